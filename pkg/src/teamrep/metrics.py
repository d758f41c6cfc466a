"""Evaluation harness: accuracy, communication cost and per-size reporting."""

from __future__ import annotations

import csv
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import combinations
from statistics import fmean
from typing import Iterable, Mapping, Sequence

from .corpus import MAX_TEAM_SIZE, MIN_TEAM_SIZE, CollaborationNetwork, PublicationRecord, Team
from .errors import DataError, ParameterError
from .familiarity import HIGHER_ORDER, PAIRWISE, count_higher_order, detect_outliers
from .kernel import (
    DEFAULT_HOPS, DEFAULT_MAX_ITER, DEFAULT_MU, DEFAULT_TOL, DEFAULT_TOP_K,
    ablation_score, build_problem, candidate_pool, omr_score,
)
from .motifs import MotifIndex

logger = logging.getLogger(__name__)

# method name -> (familiarity mode for the full score, ablation) ; exactly one is set
METHODS = {
    "omr_h": (HIGHER_ORDER, None),
    "omr_p": (PAIRWISE, None),
    "kernel": (None, "structure"),
    "skill": (None, "skill"),
    "pairwise": (None, PAIRWISE),
    "high_order": (None, HIGHER_ORDER),
}


def accuracy(recommended: Iterable[str], joined: Iterable[str]) -> float:
    """Fraction of actual joiners that appear in the recommendation list."""
    joined = set(joined)
    if not joined:
        raise ParameterError("accuracy needs a non-empty set of actual joiners")
    return len(set(recommended) & joined) / len(joined)


def bfs_distances(network: CollaborationNetwork, source: str) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in network.neighbors(u):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def _distance_table(network, members):
    penalty = len(network)
    tables = {m: bfs_distances(network, m) for m in set(members)}

    def d(a, b):
        return tables[a].get(b, penalty)

    return d


def _members(team):
    return team.members if isinstance(team, Team) else tuple(team)


def avg_shortest_path(network: CollaborationNetwork, team: Team | Sequence[str]) -> float:
    """Mean hop distance over member pairs, measured in the whole network.

    Unreachable pairs count as ``len(network)``.
    """
    members = _members(team)
    n = len(members)
    if n < 2:
        raise ParameterError("average shortest path needs at least two members")
    d = _distance_table(network, members)
    total = sum(d(a, b) for a, b in combinations(members, 2))
    return 2 * total / (n * (n - 1))


def sum_distance(
    network: CollaborationNetwork, team: Team | Sequence[str], skill_set: Sequence[str]
) -> float:
    """Sum over skill pairs of the distance between their holders.

    With several holders of a skill, each pair takes the closest holder pair.
    """
    members = _members(team)
    holders = {}
    for s in skill_set:
        hs = [m for m in members if s in network.skills.get(m, ())]
        if not hs:
            raise DataError(f"skill {s!r} is held by no team member")
        holders[s] = hs
    d = _distance_table(network, members)

    def closest(a, b):
        return min(0 if x == y else d(x, y) for x in holders[a] for y in holders[b])

    return float(sum(closest(a, b) for a, b in combinations(skill_set, 2)))


def temporal_split(
    pubs: Iterable[PublicationRecord],
    train: tuple[int, int],
    test: tuple[int, int],
) -> tuple[list[PublicationRecord], list[PublicationRecord]]:
    """Split records into (standard set, testing set) by year.

    ``train`` years feed prediction (the testing set); ``test`` years hold
    the later ground truth (the standard set). Records in neither range are
    dropped.
    """
    if max(train[0], test[0]) <= min(train[1], test[1]) and train[0] <= train[1] and test[0] <= test[1]:
        raise ParameterError(f"year ranges {train} and {test} overlap")
    standard = [r for r in pubs if test[0] <= r.year <= test[1]]
    testing = [r for r in pubs if train[0] <= r.year <= train[1]]
    return standard, testing


@dataclass(frozen=True)
class GroundTruth:
    departed: str
    joined: frozenset[str]


def parse_ground_truth(rows: Iterable[Sequence[str]]) -> dict[str, GroundTruth]:
    departed: dict[str, str] = {}
    joined: dict[str, set[str]] = {}
    for lineno, row in enumerate(rows, start=2):
        if len(row) != 3:
            raise DataError(f"expected 3 columns, got {len(row)}", line=lineno)
        tid, dep, joiner = (c.strip() for c in row)
        if departed.setdefault(tid, dep) != dep:
            raise DataError(f"team {tid!r} has two departed members", line=lineno)
        joined.setdefault(tid, set())
        if joiner:
            joined[tid].add(joiner)
    return {t: GroundTruth(departed[t], frozenset(joined[t])) for t in departed}


def load_ground_truth(path) -> dict[str, GroundTruth]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["team_id", "departed_id", "joiner_id"]:
            raise DataError("ground-truth file must start with header team_id,departed_id,joiner_id", line=1)
        return parse_ground_truth(reader)


def write_ground_truth(truth: Mapping[str, GroundTruth], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["team_id", "departed_id", "joiner_id"])
    for tid, gt in truth.items():
        for j in sorted(gt.joined):
            w.writerow([tid, gt.departed, j])


@dataclass(frozen=True)
class TeamResult:
    team_id: str
    size: int
    method: str
    outlier: str
    detected: bool
    recommended: tuple[str, ...]
    accuracy: float
    path_before: float
    path_after: float
    sum_before: float
    sum_after: float


@dataclass(frozen=True)
class BucketSummary:
    method: str
    size: int
    n_teams: int
    accuracy: float
    detection: float
    path_before: float
    path_after: float
    sum_before: float
    sum_after: float


@dataclass(frozen=True)
class EvaluationReport:
    teams: tuple[TeamResult, ...]
    buckets: tuple[BucketSummary, ...]

    def bucket(self, method: str, size: int) -> BucketSummary:
        for b in self.buckets:
            if b.method == method and b.size == size:
                return b
        raise KeyError((method, size))


def method_scores(problem, methods: Sequence[str]) -> dict[str, float]:
    out = {}
    for m in methods:
        mode, ablation = METHODS[m]
        if ablation is None:
            out[m] = omr_score(replace(problem, mode=mode))
        else:
            out[m] = ablation_score(problem, ablation)
    return out


def team_skill_set(network: CollaborationNetwork, members: Sequence[str]) -> list[str]:
    """Skills covered by ``members``; used as the required skills of a team."""
    return sorted(set().union(*(network.skills.get(m, frozenset()) for m in members)))


def _evaluate_team(network, index, team, truth, methods, k, mu, hops, tol, max_iter):
    ranking = detect_outliers(network, index, team)
    p = ranking[0].scholar
    remaining = team.without(p)
    pool = sorted(candidate_pool(network, remaining, hops, exclude={p}))
    if not pool:
        logger.warning("team %s: empty candidate pool, skipped", team.team_id)
        return []
    scores = {}
    familiarity = {}
    for c in pool:
        problem = build_problem(network, index, remaining, p, c, HIGHER_ORDER, mu, tol, max_iter)
        scores[c] = method_scores(problem, methods)
        familiarity[c] = count_higher_order(index, (c, *remaining), c)

    skills = team_skill_set(network, remaining)
    path_before = avg_shortest_path(network, team)
    sum_before = sum_distance(network, team, skills)
    results = []
    for m in methods:
        order = sorted(pool, key=lambda c: (-scores[c][m], -familiarity[c], c))
        top = tuple(order[:k])
        new_team = (top[0], *remaining)
        results.append(TeamResult(
            team_id=team.team_id,
            size=len(team),
            method=m,
            outlier=p,
            detected=p == truth.departed,
            recommended=top,
            accuracy=accuracy(top, truth.joined),
            path_before=path_before,
            path_after=avg_shortest_path(network, new_team),
            sum_before=sum_before,
            sum_after=sum_distance(network, new_team, skills),
        ))
    return results


def _mean(xs):
    return fmean(xs) if xs else math.nan


def summarise(results: Sequence[TeamResult], methods: Sequence[str], sizes: Iterable[int]) -> list[BucketSummary]:
    out = []
    for m in methods:
        for size in sizes:
            rs = [r for r in results if r.method == m and r.size == size]
            out.append(BucketSummary(
                method=m,
                size=size,
                n_teams=len(rs),
                accuracy=_mean([r.accuracy for r in rs]),
                detection=_mean([float(r.detected) for r in rs]),
                path_before=_mean([r.path_before for r in rs]),
                path_after=_mean([r.path_after for r in rs]),
                sum_before=_mean([r.sum_before for r in rs]),
                sum_after=_mean([r.sum_after for r in rs]),
            ))
    return out


def evaluate_run(
    network: CollaborationNetwork,
    index: MotifIndex,
    teams: Sequence[Team],
    ground_truth: Mapping[str, GroundTruth],
    methods: Sequence[str] = tuple(METHODS),
    k: int = DEFAULT_TOP_K,
    mu: float = DEFAULT_MU,
    hops: int = DEFAULT_HOPS,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    threads: int = 1,
    sizes: Iterable[int] = range(MIN_TEAM_SIZE, MAX_TEAM_SIZE + 1),
) -> EvaluationReport:
    """Detect, replace and score every team that has ground truth.

    The detected outlier is replaced for every method; ``detected`` records
    whether it matches the member that actually left.
    """
    methods = list(methods)
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ParameterError(f"unknown method(s) {unknown}; expected from {list(METHODS)}")
    if not methods:
        return EvaluationReport((), ())

    todo = []
    for team in teams:
        truth = ground_truth.get(team.team_id)
        if truth is None or not truth.joined:
            logger.warning("team %s has no ground truth, skipped", team.team_id)
            continue
        todo.append((team, truth))

    def one(item):
        team, truth = item
        return _evaluate_team(network, index, team, truth, methods, k, mu, hops, tol, max_iter)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            nested = list(ex.map(one, todo))
    else:
        nested = [one(item) for item in todo]
    results = tuple(r for rs in nested for r in rs)
    return EvaluationReport(results, tuple(summarise(results, methods, list(sizes))))


REPORT_HEADER = [
    "method", "team_size", "n_teams", "accuracy", "detection_rate",
    "avg_path_before", "avg_path_after", "sum_distance_before", "sum_distance_after",
]


def write_report(report: EvaluationReport, fh, fmt=repr) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for b in report.buckets:
        w.writerow([
            b.method, b.size, b.n_teams, fmt(b.accuracy), fmt(b.detection),
            fmt(b.path_before), fmt(b.path_after), fmt(b.sum_before), fmt(b.sum_after),
        ])


def format_summary(report: EvaluationReport) -> str:
    lines = [f"{'method':<11}{'size':>5}{'teams':>7}{'acc':>8}{'path':>15}{'sumdist':>17}"]
    for b in report.buckets:
        if not b.n_teams:
            continue
        lines.append(
            f"{b.method:<11}{b.size:>5}{b.n_teams:>7}{b.accuracy:>8.3f}"
            f"{b.path_before:>7.2f}->{b.path_after:<6.2f}{b.sum_before:>8.2f}->{b.sum_after:<7.2f}"
        )
    return "\n".join(lines)
