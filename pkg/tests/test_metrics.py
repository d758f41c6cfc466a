import io
import math

import pytest
from hypothesis import given, settings, strategies as st

from teamrep.corpus import PublicationRecord, Team
from teamrep.errors import DataError, ParameterError
from teamrep.metrics import (
    GroundTruth, accuracy, avg_shortest_path, evaluate_run, format_summary, parse_ground_truth,
    sum_distance, temporal_split, write_ground_truth, write_report,
)
from teamrep.motifs import enumerate_motifs
from teamrep.synth import generate_planted, generate_random_network

from conftest import net
from oracles import brute_avg_path


def test_accuracy_examples():
    assert accuracy(["x", "y", "z"], {"x"}) == 1.0
    assert accuracy(["y"], {"x"}) == 0.0
    assert accuracy(["x", "y"], {"x", "z"}) == 0.5
    with pytest.raises(ParameterError):
        accuracy(["x"], set())


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 20), max_size=10), st.sets(st.integers(0, 20), min_size=1, max_size=10))
def test_accuracy_set_arithmetic(q, real):
    acc = accuracy(q, real)
    assert 0.0 <= acc <= 1.0
    assert acc == len(set(q) & real) / len(real)
    for k in range(len(q)):
        assert accuracy(q[:k], real) <= accuracy(q[:k + 1], real)


def test_avg_path_clique_and_path():
    clique = net([(x, y) for i, x in enumerate("abcd") for y in "abcd"[i + 1:]])
    assert avg_shortest_path(clique, Team("t", tuple("abcd"))) == 1.0
    path = net([("a", "b"), ("b", "c")])
    assert avg_shortest_path(path, ["a", "b", "c"]) == pytest.approx(4 / 3)
    with pytest.raises(ParameterError):
        avg_shortest_path(path, ["a"])


def test_avg_path_unreachable_penalty():
    g = net([("a", "b"), ("c", "d")], vertices=[f"z{i}" for i in range(6)])
    assert len(g) == 10
    # pairs: (a,b)=1, (a,c)=(a,d)=(b,c)=(b,d)=10, (c,d)=1
    assert avg_shortest_path(g, ["a", "b", "c", "d"]) == pytest.approx(2 * 42 / 12)


@pytest.mark.parametrize("seed", range(8))
def test_avg_path_matches_bfs_oracle(seed):
    g = generate_random_network(seed, 30 + 8 * seed, 0.06)
    members = list(g.vertices[::5][:7])
    assert avg_shortest_path(g, members) == brute_avg_path(g, members)


def test_sum_distance_examples():
    clique = net([("a", "b"), ("b", "c"), ("a", "c")], skills={"a": ["s1"], "b": ["s2"], "c": ["s3"]})
    assert sum_distance(clique, ["a", "b", "c"], ["s1", "s2", "s3"]) == 3
    assert sum_distance(clique, ["a", "b", "c"], ["s1"]) == 0
    both = net([("a", "b")], skills={"a": ["s1", "s2"]})
    assert sum_distance(both, ["a", "b"], ["s1", "s2"]) == 0
    with pytest.raises(DataError, match="s9"):
        sum_distance(clique, ["a", "b", "c"], ["s1", "s9"])


def test_sum_distance_takes_closest_holders():
    g = net([("a", "b"), ("b", "c"), ("c", "d")], skills={"a": ["x"], "d": ["x"], "c": ["y"]})
    assert sum_distance(g, list("abcd"), ["x", "y"]) == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 1000), st.randoms(use_true_random=False))
def test_sum_distance_permutation_invariant(seed, rnd):
    g = generate_random_network(seed, 20, 0.2, n_skills=5)
    members = list(g.vertices[:6])
    skills = sorted(set().union(*(g.skills[m] for m in members)))
    shuffled = list(skills)
    rnd.shuffle(shuffled)
    assert sum_distance(g, members, skills) == sum_distance(g, members, shuffled)


def test_temporal_split_default_years():
    pubs = [PublicationRecord(f"p{y}", y, ("a", "b")) for y in range(2003, 2018)]
    standard, testing = temporal_split(pubs, (2005, 2012), (2013, 2015))
    assert [r.year for r in testing] == list(range(2005, 2013))
    assert [r.year for r in standard] == [2013, 2014, 2015]
    assert {r.id for r in standard}.isdisjoint(r.id for r in testing)
    empty, _ = temporal_split(pubs, (2005, 2012), (2020, 2022))
    assert empty == []
    with pytest.raises(ParameterError):
        temporal_split(pubs, (2005, 2012), (2012, 2015))


def test_ground_truth_roundtrip():
    truth = {"t1": GroundTruth("p", frozenset({"x", "y"}))}
    buf = io.StringIO()
    write_ground_truth(truth, buf)
    rows = [line.split(",") for line in buf.getvalue().splitlines()[1:]]
    assert parse_ground_truth(rows) == truth
    with pytest.raises(DataError):
        parse_ground_truth([("t1", "p", "x"), ("t1", "q", "y")])


def planted(seed=3, size=5):
    inst = generate_planted(seed, size)
    return inst, enumerate_motifs(inst.network)


def test_evaluate_planted_team_full_accuracy():
    inst, idx = planted()
    truth = {inst.team.team_id: inst.ground_truth()}
    report = evaluate_run(inst.network, idx, [inst.team], truth, ["omr_h", "omr_p"], k=1)
    b = report.bucket("omr_h", 5)
    assert b.n_teams == 1 and b.accuracy == 1.0 and b.detection == 1.0
    assert report.bucket("omr_h", 3).n_teams == 0 and math.isnan(report.bucket("omr_h", 3).accuracy)
    assert {r.size for r in report.teams} == {5}
    assert "omr_h" in format_summary(report)


def test_evaluate_no_methods_is_empty():
    inst, idx = planted()
    report = evaluate_run(inst.network, idx, [inst.team], {inst.team.team_id: inst.ground_truth()}, [])
    assert report.teams == () and report.buckets == ()


def test_evaluate_skips_teams_without_truth(caplog):
    inst, idx = planted()
    report = evaluate_run(inst.network, idx, [inst.team], {}, ["omr_h"])
    assert report.teams == () and "no ground truth" in caplog.text


def test_evaluate_unknown_method():
    inst, idx = planted()
    with pytest.raises(ParameterError):
        evaluate_run(inst.network, idx, [inst.team], {}, ["tfp"])


def test_identical_replacement_keeps_path():
    g = net([("p", "a"), ("a", "b"), ("p", "b")])
    assert avg_shortest_path(g, ["p", "a", "b"]) == avg_shortest_path(g, ["a", "b", "p"])


def test_report_csv_layout():
    inst, idx = planted()
    report = evaluate_run(inst.network, idx, [inst.team], {inst.team.team_id: inst.ground_truth()}, ["kernel"])
    buf = io.StringIO()
    write_report(report, buf, fmt=lambda x: f"{x:.12g}")
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("method,team_size,n_teams,accuracy")
    assert [l.split(",")[1] for l in lines[1:]] == [str(s) for s in range(3, 10)]
