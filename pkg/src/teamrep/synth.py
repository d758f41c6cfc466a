"""Seeded synthetic networks and planted outlier/replacement instances.

All randomness comes from :class:`SplitMix64` so fixtures can be rebuilt
bit-for-bit from a seed by any implementation of the same generator:

    state <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z <- state
    z <- (z xor (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
    z <- (z xor (z >> 27)) * 0x94D049BB133111EB mod 2^64
    output z xor (z >> 31)

``random()`` is ``(output >> 11) * 2^-53``; ``below(n)`` is
``floor(random() * n)``; ``shuffle`` is Fisher-Yates from the last index
down, swapping index ``i`` with ``below(i + 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .corpus import MAX_TEAM_SIZE, MIN_TEAM_SIZE, CollaborationNetwork, PublicationRecord, Team
from .errors import ParameterError
from .metrics import GroundTruth

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, n: int) -> int:
        return int(self.random() * n)

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def subset(self, items: Sequence, prob: float) -> list:
        return [x for x in items if self.random() < prob]


def skill_labels(n_skills: int) -> list[str]:
    return [f"skill{j:02d}" for j in range(n_skills)]


def generate_random_network(seed: int, n: int, edge_prob: float, n_skills: int = 0) -> CollaborationNetwork:
    """Erdos-Renyi graph on ``v000..`` with each skill held with probability 1/2.

    Pairs are visited in lexicographic order, then skills scholar by scholar.
    """
    if not 0.0 <= edge_prob <= 1.0:
        raise ParameterError(f"edge probability must lie in [0, 1], got {edge_prob}")
    rng = SplitMix64(seed)
    width = max(3, len(str(n - 1)))
    names = [f"v{i:0{width}d}" for i in range(n)]
    edges = [(a, b) for i, a in enumerate(names) for b in names[i + 1:] if rng.random() < edge_prob]
    labels = skill_labels(n_skills)
    skills = {v: rng.subset(labels, 0.5) for v in names}
    return CollaborationNetwork.from_edges(edges, skills=skills, vertices=names)


@dataclass(frozen=True)
class PlantedInstance:
    network: CollaborationNetwork
    team: Team
    planted_outlier: str
    planted_best_candidate: str
    seed: int
    pool: tuple[str, ...] = ()

    def ground_truth(self) -> GroundTruth:
        return GroundTruth(self.planted_outlier, frozenset({self.planted_best_candidate}))


def _triangle_chain(members: Sequence[str]) -> list[tuple[str, str]]:
    """Triangles sharing one vertex in sequence; an even count closes with a diamond.

    Every member ends up in a triangle and the largest eigenvalue stays
    below 3, so the default decay is admissible for teams up to 9.
    """
    r = len(members)
    edges = []
    i = 0
    while i + 2 < r:
        a, b, c = members[i], members[i + 1], members[i + 2]
        edges += [(a, b), (a, c), (b, c)]
        i += 2
    if r % 2 == 0 and r >= 4:
        edges += [(members[-1], members[-2]), (members[-1], members[-3])]
    return edges


def generate_planted(
    seed: int,
    team_size: int,
    pool_size: int = 8,
    noise: float = 0.0,
    n_skills: int = 6,
    outside_triangles: int = 2,
    prefix: str = "",
) -> PlantedInstance:
    """Team with one planted outlier and one planted ideal replacement.

    Construction (``R = team_size - 1`` remaining members):

    * remaining members form a triangle chain, so each has in-team motif
      partners only;
    * for ``R >= 3`` the outlier touches one remaining member through an
      edge that closes no triangle, and all its motif partners come from
      ``outside_triangles`` triangles with outsiders; for ``R == 2`` the
      outlier closes the single in-team triangle but has more outside
      partners than any remaining member;
    * the planted candidate copies the outlier's in-team edges and skills
      and has its own outside triangle;
    * ``pool_size - 1`` decoys hang off the planted candidate, two hops
      from the team, each holding a random half of the outlier's skills.

    ``noise`` is the probability scale of perturbations: each decoy links to
    each remaining member with probability ``noise / 2``, each decoy pair
    links with probability ``noise / 2`` and every skill bit of the
    candidate and the decoys flips with probability ``noise``.
    """
    if not MIN_TEAM_SIZE <= team_size <= MAX_TEAM_SIZE:
        raise ParameterError(f"team size {team_size} outside [{MIN_TEAM_SIZE}, {MAX_TEAM_SIZE}]")
    if pool_size < 2:
        raise ParameterError(f"pool size must be >= 2, got {pool_size}")
    if not 0.0 <= noise <= 1.0:
        raise ParameterError(f"noise must lie in [0, 1], got {noise}")
    if n_skills < 1:
        raise ParameterError("planted instances need at least one skill")

    rng = SplitMix64(seed)
    r = team_size - 1
    n_decoys = pool_size - 1
    n_outside = 2 * outside_triangles + 2
    total = team_size + 1 + n_decoys + n_outside
    names = rng.shuffle([f"{prefix}s{i:03d}" for i in range(total)])
    p, cand = names[0], names[1]
    remaining = names[2:2 + r]
    decoys = names[2 + r:2 + r + n_decoys]
    outsiders = names[2 + r + n_decoys:]
    labels = skill_labels(n_skills)

    edges = _triangle_chain(remaining)
    if r == 2:
        attach = list(remaining)
        edges.append((remaining[0], remaining[1]))
    else:
        attach = [remaining[0]]
    for who in (p, cand):
        edges += [(who, m) for m in attach]
    it = iter(outsiders)
    for _ in range(outside_triangles):
        x, y = next(it), next(it)
        edges += [(p, x), (p, y), (x, y)]
    y1, y2 = next(it), next(it)
    edges += [(cand, y1), (cand, y2), (y1, y2)]
    edges += [(cand, d) for d in decoys]

    skills: dict[str, list[str]] = {}
    for m in remaining:
        skills[m] = rng.subset(labels, 0.5) or [labels[rng.below(n_skills)]]
    skills[p] = rng.subset(labels, 0.5) or [labels[rng.below(n_skills)]]
    skills[cand] = list(skills[p])
    for d in decoys:
        skills[d] = rng.subset(skills[p], 0.5)

    if noise > 0:
        for d in decoys:
            edges += [(d, m) for m in remaining if rng.random() < noise / 2]
        for i, d in enumerate(decoys):
            edges += [(d, e) for e in decoys[i + 1:] if rng.random() < noise / 2]
        for who in (cand, *decoys):
            held = set(skills[who])
            skills[who] = [s for s in labels if (s in held) != (rng.random() < noise)]

    members = rng.shuffle([p, *remaining])
    network = CollaborationNetwork.from_edges(edges, skills=skills, vertices=names)
    return PlantedInstance(
        network=network,
        team=Team(f"{prefix}team", tuple(members)),
        planted_outlier=p,
        planted_best_candidate=cand,
        seed=seed,
        pool=tuple(sorted([cand, *decoys])),
    )


def merge_networks(networks: Sequence[CollaborationNetwork]) -> CollaborationNetwork:
    edges, skills, verts = [], {}, []
    for g in networks:
        edges.extend(g.edges())
        skills.update(g.skills)
        verts.extend(g.vertices)
    return CollaborationNetwork.from_edges(edges, skills=skills, vertices=verts)


def network_to_publications(
    network: CollaborationNetwork, year: int = 2010, prefix: str = "pub"
) -> list[PublicationRecord]:
    """Publication records that rebuild ``network`` exactly.

    Each unit of edge weight is a two-author paper without skills; each
    scholar also gets a single-author paper carrying their skills, which
    keeps isolated scholars and skill sets intact.
    """
    recs = []
    n = 0
    for a, b, w in network.edges():
        for _ in range(w):
            n += 1
            recs.append(PublicationRecord(f"{prefix}{n:07d}", year, (a, b), ()))
    for v in network.vertices:
        n += 1
        recs.append(PublicationRecord(f"{prefix}{n:07d}", year, (v,), tuple(sorted(network.skills[v]))))
    return recs


def planted_corpus(
    seed: int,
    count: int,
    pool_size: int = 8,
    noise: float = 0.0,
    n_skills: int = 6,
    train_year: int = 2010,
    test_year: int = 2014,
    sizes: Sequence[int] = range(MIN_TEAM_SIZE, MAX_TEAM_SIZE + 1),
):
    """``count`` planted instances on disjoint scholar ids, as one corpus.

    Instance ``i`` uses seed ``seed + i`` and team size ``sizes[i % len(sizes)]``.
    Every instance adds one later-year paper in which the planted candidate
    joins the remaining members.
    Returns ``(publications, teams, ground_truth, instances)``.
    """
    sizes = list(sizes)
    instances = [
        generate_planted(seed + i, sizes[i % len(sizes)], pool_size, noise, n_skills, prefix=f"i{i:03d}_")
        for i in range(count)
    ]
    network = merge_networks([inst.network for inst in instances])
    pubs = network_to_publications(network, train_year)
    for i, inst in enumerate(instances):
        authors = (inst.planted_best_candidate, *inst.team.without(inst.planted_outlier))
        pubs.append(PublicationRecord(f"join{i:05d}", test_year, authors, ()))
    teams = [inst.team for inst in instances]
    truth = {inst.team.team_id: inst.ground_truth() for inst in instances}
    return pubs, teams, truth, instances
