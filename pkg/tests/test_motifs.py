import io
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from teamrep.errors import DataError, ParameterError
from teamrep.motifs import enumerate_motifs, motif_partner_count, multi_col, write_instances
from teamrep.synth import generate_random_network

from conftest import net
from oracles import trace_triangles

K4 = [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]


def brute_cliques(network, k):
    return sorted(
        c for c in combinations(network.vertices, k)
        if all(network.has_edge(x, y) for x, y in combinations(c, 2))
    )


def test_triangle(triangle):
    idx = enumerate_motifs(triangle)
    assert idx.instances == (("a", "b", "c"),)
    assert multi_col(idx, "a", "b") == 1
    assert motif_partner_count(idx, "a") == 2


def test_four_clique_has_four_triangles():
    g = net(K4)
    idx = enumerate_motifs(g, 3)
    assert list(idx.instances) == brute_cliques(g, 3)
    assert len(idx) == 4
    assert len(enumerate_motifs(g, 4)) == 1


def test_path_has_no_motif():
    idx = enumerate_motifs(net([("a", "b"), ("b", "c")]))
    assert len(idx) == 0
    assert multi_col(idx, "a", "c") == 0


def test_diamond_missing_edge_pair():
    g = net([e for e in K4 if e != ("a", "c")])
    idx = enumerate_motifs(g)
    assert list(idx.instances) == brute_cliques(g, 3) == [("a", "b", "d"), ("b", "c", "d")]
    assert multi_col(idx, "a", "c") == 0
    assert multi_col(idx, "a", "b") == 1


def test_partner_counts():
    g = net([("a", "b"), ("b", "c"), ("a", "c"), ("a", "d"), ("a", "e"), ("d", "e")], vertices=["z"])
    idx = enumerate_motifs(g)
    assert motif_partner_count(idx, "a") == 4
    assert motif_partner_count(idx, "z") == 0
    with pytest.raises(DataError):
        motif_partner_count(idx, "nobody")


def test_parameter_errors(triangle):
    with pytest.raises(ParameterError):
        enumerate_motifs(triangle, 2)
    idx = enumerate_motifs(triangle)
    with pytest.raises(ParameterError):
        multi_col(idx, "a", "a")


def test_instance_cap(triangle):
    with pytest.raises(ParameterError, match="max_instances"):
        enumerate_motifs(net(K4), 3, max_instances=3)


def test_export_csv(triangle):
    buf = io.StringIO()
    write_instances(enumerate_motifs(triangle), buf)
    assert buf.getvalue() == "member_1,member_2,member_3\na,b,c\n"


@pytest.mark.parametrize("seed", range(10))
def test_triangle_count_matches_trace(seed):
    g = generate_random_network(seed, 10 + 4 * seed, 0.3)
    assert len(enumerate_motifs(g)) == trace_triangles(g)


graphs = st.integers(4, 11).flatmap(
    lambda n: st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] < e[1]))
    .map(lambda es: (n, sorted(es)))
)


def build(n, es):
    return net([(f"v{a}", f"v{b}") for a, b in es], vertices=[f"v{i}" for i in range(n)])


@settings(max_examples=80, deadline=None)
@given(graphs, st.integers(3, 5))
def test_matches_bruteforce_and_invariants(graph, k):
    g = build(*graph)
    idx = enumerate_motifs(g, k)
    assert list(idx.instances) == brute_cliques(g, k)
    for a, b in combinations(g.vertices, 2):
        assert multi_col(idx, a, b) == multi_col(idx, b, a)
    for v in g.vertices:
        assert motif_partner_count(idx, v) == sum(multi_col(idx, v, u) for u in g.vertices if u != v)


@settings(max_examples=60, deadline=None)
@given(graphs, st.data())
def test_adding_edge_never_decreases_partner_count(graph, data):
    n, es = graph
    missing = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in es]
    if not missing:
        return
    extra = data.draw(st.sampled_from(missing))
    before = enumerate_motifs(build(n, es))
    after = enumerate_motifs(build(n, es + [extra]))
    for v in before.partners:
        assert motif_partner_count(after, v) >= motif_partner_count(before, v)
