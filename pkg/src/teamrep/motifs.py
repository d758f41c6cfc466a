"""k-clique motif enumeration and per-pair / per-scholar participation."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Mapping

from .corpus import CollaborationNetwork
from .errors import DataError, ParameterError

DEFAULT_ORDER = 3
DEFAULT_MAX_INSTANCES = 10**7


@dataclass(frozen=True)
class MotifIndex:
    """All k-clique instances of a network plus who shares one with whom.

    ``partners[i]`` is the set of scholars that appear together with ``i``
    in at least one instance.
    """

    order: int
    instances: tuple[tuple[str, ...], ...]
    partners: Mapping[str, frozenset[str]]

    def __len__(self) -> int:
        return len(self.instances)


def _ordered_out_neighbors(network: CollaborationNetwork) -> dict[str, set[str]]:
    # orient each edge from lower to higher (degree, id) rank
    rank = {v: (network.degree(v), v) for v in network.vertices}
    return {
        v: {u for u in network.neighbors(v) if rank[u] > rank[v]} for v in network.vertices
    }


def enumerate_motifs(
    network: CollaborationNetwork,
    k: int = DEFAULT_ORDER,
    max_instances: int = DEFAULT_MAX_INSTANCES,
) -> MotifIndex:
    """Enumerate every k-clique of the unweighted skeleton of ``network``.

    Each clique is grown from its lowest-ranked vertex through out-neighbor
    intersections in the degree ordering, so it is produced exactly once.
    Instances are returned as sorted tuples in sorted order.
    """
    if k < 3:
        raise ParameterError(f"motif order must be >= 3, got {k}")
    out = _ordered_out_neighbors(network)
    found: list[tuple[str, ...]] = []

    def grow(clique: list[str], cand: set[str]) -> None:
        if len(clique) == k:
            if len(found) >= max_instances:
                raise ParameterError(
                    f"more than {max_instances} motif instances; raise max_instances"
                )
            found.append(tuple(sorted(clique)))
            return
        if len(clique) + len(cand) < k:
            return
        for u in sorted(cand):
            clique.append(u)
            grow(clique, cand & out[u])
            clique.pop()

    for v in network.vertices:
        if len(out[v]) >= k - 1:
            grow([v], out[v])

    found.sort()
    partners: dict[str, set[str]] = {v: set() for v in network.vertices}
    for inst in found:
        for a in inst:
            partners[a].update(inst)
    for v, s in partners.items():
        s.discard(v)
    return MotifIndex(k, tuple(found), {v: frozenset(s) for v, s in partners.items()})


def multi_col(index: MotifIndex, i: str, j: str) -> int:
    """1 if scholars ``i`` and ``j`` share at least one motif instance, else 0."""
    if i == j:
        raise ParameterError(f"multi_col needs two distinct scholars, got {i!r} twice")
    return int(j in index.partners.get(i, ()))


def motif_partner_count(index: MotifIndex, i: str) -> int:
    try:
        return len(index.partners[i])
    except KeyError:
        raise DataError(f"unknown scholar {i!r}") from None


def write_instances(index: MotifIndex, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow([f"member_{n}" for n in range(1, index.order + 1)])
    w.writerows(index.instances)
