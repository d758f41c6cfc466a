"""Pairwise and higher-order familiarity, outlier degree and outlier ranking."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

from .corpus import CollaborationNetwork, Team
from .errors import DataError
from .motifs import MotifIndex, motif_partner_count

PAIRWISE = "pairwise"
HIGHER_ORDER = "higher-order"
MODES = (PAIRWISE, HIGHER_ORDER)


@dataclass(frozen=True)
class FamiliarityScore:
    scholar: str
    team: str
    pairwise: int
    higher_order: int
    outlier_degree: float


def _members(team: Team | Sequence[str]) -> Sequence[str]:
    return team.members if isinstance(team, Team) else team


def _check_member(team, i):
    if i not in _members(team):
        name = team.team_id if isinstance(team, Team) else "<members>"
        raise DataError(f"scholar {i!r} is not a member of team {name!r}")


def count_pairwise(network: CollaborationNetwork, members: Sequence[str], i: str) -> int:
    nb = network.neighbors(i)
    return sum(1 for j in members if j != i and j in nb)


def count_higher_order(index: MotifIndex, members: Sequence[str], i: str) -> int:
    partners = index.partners.get(i, frozenset())
    return sum(1 for j in members if j != i and j in partners)


def pairwise_familiarity(network: CollaborationNetwork, team: Team, i: str) -> int:
    """Number of other team members ``i`` has co-authored with."""
    _check_member(team, i)
    return count_pairwise(network, _members(team), i)


def higher_order_familiarity(index: MotifIndex, team: Team, i: str) -> int:
    """Number of other team members sharing a motif instance with ``i``."""
    _check_member(team, i)
    return count_higher_order(index, _members(team), i)


def outlier_degree(index: MotifIndex, team: Team, i: str) -> float:
    """Share of ``i``'s motif partners that sit inside the team.

    A scholar with no motif partners anywhere gets 0.
    """
    ho = higher_order_familiarity(index, team, i)
    total = motif_partner_count(index, i)
    return ho / total if total else 0.0


def score_member(network, index, team: Team, i: str) -> FamiliarityScore:
    return FamiliarityScore(
        scholar=i,
        team=team.team_id,
        pairwise=pairwise_familiarity(network, team, i),
        higher_order=higher_order_familiarity(index, team, i),
        outlier_degree=outlier_degree(index, team, i),
    )


def detect_outliers(
    network: CollaborationNetwork, index: MotifIndex, team: Team
) -> list[FamiliarityScore]:
    """Team members ordered from most to least likely to leave.

    Sort key is (outlier degree, higher-order, pairwise, id), all ascending;
    the first entry is the predicted outlier.
    """
    scores = [score_member(network, index, team, m) for m in team.members]
    return sorted(scores, key=lambda s: (s.outlier_degree, s.higher_order, s.pairwise, s.scholar))


def flag_outliers(ranking: Sequence[FamiliarityScore], threshold: float | None = None):
    """Predicted outliers: every member at or below ``threshold``, else the argmin."""
    if not ranking:
        return []
    if threshold is None:
        return [ranking[0]]
    return [s for s in ranking if s.outlier_degree <= threshold]


OUTLIER_HEADER = ["team_id", "member_id", "pairwise", "higher_order", "outlier_degree", "rank"]


def write_outlier_rows(writer, ranking: Sequence[FamiliarityScore], fmt=repr) -> None:
    for rank, s in enumerate(ranking, start=1):
        writer.writerow([s.team, s.scholar, s.pairwise, s.higher_order, fmt(s.outlier_degree), rank])


def write_outliers(rankings, fh, fmt=repr) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(OUTLIER_HEADER)
    for ranking in rankings:
        write_outlier_rows(w, ranking, fmt)
