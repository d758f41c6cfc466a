"""Random-walk graph-kernel scoring of replacement candidates.

The score of a candidate ``c`` replacing member ``p`` compares the original
team (``p`` first, then the remaining members) with the candidate team
(``c`` first, same remaining order) through simultaneous walks on the
Kronecker product of the two team graphs::

    score = x1^T (I - mu * A_old (x) A_new)^-1  sum_j (F_old S_old^j (x) F_new S_new^j) x2

with ``S^0 = I``, diagonal skill indicators ``S^j`` for j >= 1, and diagonal
familiarity matrices ``F``. Vectors over the product graph use row-major
pair indexing: entry ``u * t + v`` pairs old position ``u`` with new
position ``v``.
"""

from __future__ import annotations

import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import CollaborationNetwork, Team
from .errors import ConvergenceError, DataError, ParameterError
from .familiarity import HIGHER_ORDER, MODES, PAIRWISE, count_higher_order, count_pairwise
from .motifs import MotifIndex

logger = logging.getLogger(__name__)

DEFAULT_MU = 0.1
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10_000
DEFAULT_HOPS = 2
DEFAULT_TOP_K = 10
POWER_STEPS = 100
ADMISSIBLE_MARGIN = 0.95

ABLATIONS = ("structure", "skill", PAIRWISE, HIGHER_ORDER)


def team_adjacency(network: CollaborationNetwork, members: Sequence[str]) -> np.ndarray:
    """Edge weights among ``members`` scaled by the largest weight present."""
    t = len(members)
    A = np.zeros((t, t))
    for a, u in enumerate(members):
        nb = network.neighbors(u)
        for b, v in enumerate(members):
            if a != b:
                A[a, b] = nb.get(v, 0)
    top = A.max(initial=0.0)
    return A / top if top > 0 else A


def skill_indicators(network: CollaborationNetwork, members: Sequence[str]) -> np.ndarray:
    """``(n_S, t)`` array; row ``j - 1`` is the diagonal of skill matrix ``j``."""
    S = np.zeros((network.n_skills, len(members)))
    for m, v in enumerate(members):
        for label in network.skills.get(v, ()):
            S[network.skill_index(label) - 1, m] = 1.0
    return S


def skill_matrix(network: CollaborationNetwork, members: Sequence[str], j: int) -> np.ndarray:
    """Diagonal 0/1 matrix of holders of skill ``j``; ``j == 0`` is the identity."""
    if not 0 <= j <= network.n_skills:
        raise ParameterError(f"skill index {j} outside 0..{network.n_skills}")
    for v in members:
        network.neighbors(v)
    if j == 0:
        return np.eye(len(members))
    label = network.skill_vocabulary[j - 1]
    return np.diag([1.0 if label in network.skills[v] else 0.0 for v in members])


def familiarity_diagonal(
    network: CollaborationNetwork, index: MotifIndex, members: Sequence[str], mode: str
) -> np.ndarray:
    t = len(members)
    if t < 2:
        raise ParameterError("familiarity needs at least two members")
    if mode == PAIRWISE:
        counts = [count_pairwise(network, members, v) for v in members]
    elif mode == HIGHER_ORDER:
        for v in members:
            network.neighbors(v)
        counts = [count_higher_order(index, members, v) for v in members]
    else:
        raise ParameterError(f"unknown familiarity mode {mode!r}; expected one of {MODES}")
    return np.asarray(counts, dtype=float) / (t - 1)


def familiarity_matrix(network, index, members, mode) -> np.ndarray:
    """Diagonal matrix of each member's familiarity with the others, in [0, 1]."""
    return np.diag(familiarity_diagonal(network, index, members, mode))


def kron_apply(A: np.ndarray, B: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``(A kron B) @ v`` without forming the Kronecker product."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    v = np.asarray(v, dtype=float)
    if A.ndim != 2 or B.ndim != 2 or v.ndim != 1:
        raise ParameterError("kron_apply expects two matrices and a vector")
    (ra, ca), (rb, cb) = A.shape, B.shape
    if v.shape[0] != ca * cb:
        raise ParameterError(f"vector of length {v.shape[0]} does not match {ca}*{cb}")
    return (A @ v.reshape(ca, cb) @ B.T).reshape(ra * rb)


def spectral_radius(A: np.ndarray, steps: int = POWER_STEPS) -> float:
    """Power-iteration estimate of the spectral radius of a non-negative symmetric matrix.

    Iterates on ``A + I`` so that bipartite graphs (eigenvalue ``-rho``)
    do not stall the iteration.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if n == 0 or not A.any():
        return 0.0
    x = np.full(n, 1.0 / np.sqrt(n))
    M = A + np.eye(n)
    for _ in range(steps):
        y = M @ x
        x = y / np.linalg.norm(y)
    return float(x @ A @ x)


def admissible_mu(A_old: np.ndarray, A_new: np.ndarray) -> float:
    """Largest decay accepted for this pair of team graphs (exclusive bound)."""
    rho = spectral_radius(A_old) * spectral_radius(A_new)
    return np.inf if rho == 0 else ADMISSIBLE_MARGIN / rho


def resolvent_apply(
    A_old: np.ndarray,
    A_new: np.ndarray,
    mu: float,
    v: np.ndarray,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    bound: float | None = None,
) -> np.ndarray:
    """Solve ``(I - mu * A_old kron A_new) y = v`` by fixed-point iteration.

    Stops once the successive change, scaled by ``q / (1 - q)`` with ``q``
    the estimated contraction ``mu * rho(A_old) * rho(A_new)``, drops
    below ``tol``; this bounds the distance to the exact solution rather
    than the last step. ``bound`` may carry a precomputed
    :func:`admissible_mu` for the pair.
    """
    if mu < 0:
        raise ParameterError(f"decay must be non-negative, got {mu}")
    v = np.asarray(v, dtype=float)
    if mu == 0:
        return v.copy()
    if bound is None:
        bound = admissible_mu(A_old, A_new)
    if not mu < bound:
        raise ConvergenceError(
            f"decay mu={mu:g} violates the spectral bound mu < {bound:.6g} "
            f"(0.95 / (rho(A_old) * rho(A_new)))"
        )
    q = ADMISSIBLE_MARGIN * mu / bound
    step_tol = tol * (1 - q) / q if q > 0 else np.inf
    # iterate on the t x t reshaping: kron_apply(A, B, y) == (A @ Y @ B.T).ravel()
    kron_apply(A_old, A_new, v)
    A = np.asarray(A_old, dtype=float)
    Bt = np.asarray(A_new, dtype=float).T
    V = v.reshape(A.shape[1], Bt.shape[0])
    Y = V.copy()
    for _ in range(max_iter):
        Y_next = V + mu * (A @ Y @ Bt)
        if np.max(np.abs(Y_next - Y)) < step_tol:
            return Y_next.reshape(-1)
        Y = Y_next
    raise ConvergenceError(f"fixed-point iteration did not converge in {max_iter} steps")


@dataclass(frozen=True)
class KernelProblem:
    """Inputs of one old-team / candidate-team comparison.

    ``skills_*`` hold the diagonals of skill matrices 1..n_S (one row each);
    ``familiarity`` maps each mode to the (old, new) familiarity diagonals
    and ``mode`` selects the one used by :func:`omr_score`.
    """

    team_old: tuple[str, ...]
    team_new: tuple[str, ...]
    adj_old: np.ndarray
    adj_new: np.ndarray
    skills_old: np.ndarray
    skills_new: np.ndarray
    familiarity: Mapping[str, tuple[np.ndarray, np.ndarray]]
    mode: str = HIGHER_ORDER
    mu: float = DEFAULT_MU
    start: np.ndarray | None = None
    stop: np.ndarray | None = None
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER

    def __post_init__(self):
        t = len(self.team_old)
        if len(self.team_new) != t:
            raise ParameterError("old and new team must have the same size")
        if self.mode not in self.familiarity:
            raise ParameterError(f"no familiarity diagonals for mode {self.mode!r}")
        uniform = np.full(t * t, 1.0 / (t * t))
        if self.start is None:
            object.__setattr__(self, "start", uniform)
        if self.stop is None:
            object.__setattr__(self, "stop", uniform.copy())

    @property
    def size(self) -> int:
        return len(self.team_old)

    @cached_property
    def mu_bound(self) -> float:
        return admissible_mu(self.adj_old, self.adj_new)


def build_problem(
    network: CollaborationNetwork,
    index: MotifIndex,
    remaining: Sequence[str],
    p: str,
    cand: str,
    mode: str = HIGHER_ORDER,
    mu: float = DEFAULT_MU,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> KernelProblem:
    old = (p, *remaining)
    new = (cand, *remaining)
    fam = {m: (familiarity_diagonal(network, index, old, m), familiarity_diagonal(network, index, new, m)) for m in MODES}
    return KernelProblem(
        team_old=old,
        team_new=new,
        adj_old=team_adjacency(network, old),
        adj_new=team_adjacency(network, new),
        skills_old=skill_indicators(network, old),
        skills_new=skill_indicators(network, new),
        familiarity=fam,
        mode=mode,
        mu=mu,
        tol=tol,
        max_iter=max_iter,
    )


def _label_sum(problem: KernelProblem, f_old, f_new, skills_old, skills_new) -> np.ndarray:
    """``sum_j (F_old S_old^j kron F_new S_new^j) x2`` with the j = 0 identity term."""
    stop = problem.stop
    w = kron_apply(np.diag(f_old), np.diag(f_new), stop)
    for s_old, s_new in zip(skills_old, skills_new):
        if not (s_old.any() and s_new.any()):
            continue  # the Kronecker term is exactly zero
        w = w + kron_apply(np.diag(f_old * s_old), np.diag(f_new * s_new), stop)
    return w


def _walk(problem: KernelProblem, w: np.ndarray) -> float:
    y = resolvent_apply(
        problem.adj_old, problem.adj_new, problem.mu, w, problem.tol, problem.max_iter, problem.mu_bound
    )
    return float(problem.start @ y)


def omr_score(problem: KernelProblem) -> float:
    f_old, f_new = problem.familiarity[problem.mode]
    w = _label_sum(problem, f_old, f_new, problem.skills_old, problem.skills_new)
    return _walk(problem, w)


def ablation_score(problem: KernelProblem, which: str) -> float:
    """Score with all but one matching feature neutralised.

    ``structure`` sets every skill and familiarity matrix to the identity,
    ``skill`` sets only familiarity to the identity, and ``pairwise`` /
    ``higher-order`` keep just the j = 0 term with that familiarity.
    """
    t = problem.size
    ones = np.ones(t)
    n_s = problem.skills_old.shape[0]
    none = np.zeros((0, t))
    if which == "structure":
        all_ones = np.ones((n_s, t))
        w = _label_sum(problem, ones, ones, all_ones, all_ones)
    elif which == "skill":
        w = _label_sum(problem, ones, ones, problem.skills_old, problem.skills_new)
    elif which in MODES:
        f_old, f_new = problem.familiarity[which]
        w = _label_sum(problem, f_old, f_new, none, none)
    else:
        raise ParameterError(f"unknown ablation {which!r}; expected one of {ABLATIONS}")
    return _walk(problem, w)


def candidate_pool(
    network: CollaborationNetwork,
    remaining: Iterable[str],
    hops: int = DEFAULT_HOPS,
    exclude: Iterable[str] = (),
) -> set[str]:
    """Scholars within ``hops`` of any remaining member (``hops == 0``: everyone)."""
    remaining = list(remaining)
    if hops < 0:
        raise ParameterError(f"hop radius must be >= 0, got {hops}")
    blocked = set(remaining) | set(exclude)
    if hops == 0:
        return set(network.vertices) - blocked
    dist = {v: 0 for v in remaining}
    for v in remaining:
        network.neighbors(v)
    queue = deque(remaining)
    while queue:
        u = queue.popleft()
        if dist[u] == hops:
            continue
        for w in network.neighbors(u):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return set(dist) - blocked


@dataclass(frozen=True)
class CandidateScore:
    candidate: str
    score: float
    familiarity: int = 0
    components: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class Ranking:
    """Result of :func:`recommend`; ``status`` is ``"ok"`` or ``"empty_pool"``."""

    team_id: str
    outlier: str
    candidates: tuple[CandidateScore, ...]
    pool_size: int

    @property
    def status(self) -> str:
        return "ok" if self.pool_size else "empty_pool"

    def __iter__(self):
        return iter(self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)

    def __getitem__(self, i):
        return self.candidates[i]

    def ids(self) -> list[str]:
        return [c.candidate for c in self.candidates]


def score_candidate(
    network, index, remaining, p, cand, mode=HIGHER_ORDER, mu=DEFAULT_MU,
    tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, ablations=True,
) -> CandidateScore:
    problem = build_problem(network, index, remaining, p, cand, mode, mu, tol, max_iter)
    components = {a: ablation_score(problem, a) for a in ABLATIONS} if ablations else {}
    return CandidateScore(
        candidate=cand,
        score=omr_score(problem),
        familiarity=count_higher_order(index, (cand, *remaining), cand),
        components=components,
    )


def recommend(
    network: CollaborationNetwork,
    index: MotifIndex,
    team: Team,
    p: str,
    k: int = DEFAULT_TOP_K,
    mode: str = HIGHER_ORDER,
    mu: float = DEFAULT_MU,
    hops: int = DEFAULT_HOPS,
    exclude: Iterable[str] = (),
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    threads: int = 1,
    ablations: bool = True,
    pool: Iterable[str] | None = None,
) -> Ranking:
    """Top-``k`` replacements for outlier ``p`` ranked by kernel score.

    Ties fall back to higher-order familiarity with the remaining members
    (descending) and then to the scholar id.
    """
    if p not in team:
        raise DataError(f"scholar {p!r} is not a member of team {team.team_id!r}")
    if k < 1:
        raise ParameterError(f"top-k must be >= 1, got {k}")
    if mode not in MODES:
        raise ParameterError(f"unknown familiarity mode {mode!r}; expected one of {MODES}")
    remaining = team.without(p)
    if pool is None:
        pool = candidate_pool(network, remaining, hops, exclude={p, *exclude})
    cands = sorted(pool)
    if not cands:
        logger.warning("team %s: empty candidate pool for outlier %s", team.team_id, p)
        return Ranking(team.team_id, p, (), 0)

    def one(c):
        return score_candidate(network, index, remaining, p, c, mode, mu, tol, max_iter, ablations)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            scored = list(ex.map(one, cands))
    else:
        scored = [one(c) for c in cands]
    scored.sort(key=lambda s: (-s.score, -s.familiarity, s.candidate))
    return Ranking(team.team_id, p, tuple(scored[:k]), len(cands))


def with_identity_labels(problem: KernelProblem) -> KernelProblem:
    """Copy of ``problem`` whose skill and familiarity matrices are all identities."""
    t = problem.size
    ones = np.ones(t)
    all_ones = np.ones_like(problem.skills_old)
    return replace(
        problem,
        skills_old=all_ones,
        skills_new=all_ones.copy(),
        familiarity={m: (ones, ones) for m in problem.familiarity},
    )


RECOMMEND_HEADER = [
    "team_id", "outlier_id", "rank", "candidate_id", "omr_score",
    "structure_score", "skill_score", "pairwise_score", "higher_order_score",
]


def recommendation_rows(ranking: Ranking, fmt=repr):
    for rank, c in enumerate(ranking.candidates, start=1):
        comp = [fmt(c.components[a]) if a in c.components else "" for a in ABLATIONS]
        yield [ranking.team_id, ranking.outlier, rank, c.candidate, fmt(c.score), *comp]
