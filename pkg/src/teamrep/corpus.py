"""Publication parsing, collaboration-network construction and team rosters.

Publications are read from JSON lines, one object per line::

    {"id": "p1", "year": 2010, "authors": ["a", "b"], "skills": ["ml"]}

Teams are read from a CSV file with header ``team_id,member_id``; member
order inside a team follows file order.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DataError, ParameterError

logger = logging.getLogger(__name__)

MIN_TEAM_SIZE = 3
MAX_TEAM_SIZE = 9
DEFAULT_MAX_SKILLS = 50


@dataclass(frozen=True)
class PublicationRecord:
    id: str
    year: int
    authors: tuple[str, ...]
    skills: tuple[str, ...] = ()


def _parse_line(raw: str, lineno: int) -> PublicationRecord:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid JSON ({exc.msg})", line=lineno) from None
    if not isinstance(obj, dict):
        raise DataError("record must be a JSON object", line=lineno)
    missing = [k for k in ("id", "year", "authors") if k not in obj]
    if missing:
        raise DataError(f"missing field(s) {', '.join(missing)}", line=lineno)

    pid, year, authors = obj["id"], obj["year"], obj["authors"]
    skills = obj.get("skills", [])
    if not isinstance(pid, str) or not pid:
        raise DataError("id must be a non-empty string", line=lineno)
    if isinstance(year, bool) or not isinstance(year, int):
        raise DataError(f"year must be an integer in record {pid!r}", line=lineno)
    if not isinstance(authors, list) or not all(isinstance(a, str) and a for a in authors):
        raise DataError(f"authors must be an array of strings in record {pid!r}", line=lineno)
    if not authors:
        raise DataError(f"record {pid!r} has an empty author list", line=lineno)
    if len(set(authors)) != len(authors):
        raise DataError(f"record {pid!r} lists an author twice", line=lineno)
    if not isinstance(skills, list) or not all(isinstance(s, str) and s for s in skills):
        raise DataError(f"skills must be an array of strings in record {pid!r}", line=lineno)
    return PublicationRecord(pid, year, tuple(authors), tuple(dict.fromkeys(skills)))


def parse_publications(
    stream: Iterable[str], year_range: tuple[int, int] | None = None
) -> list[PublicationRecord]:
    """Parse line-delimited publication records.

    Blank lines are ignored. Raises :class:`DataError` carrying the 1-based
    line number for malformed records, duplicate ids, or years outside
    ``year_range`` (inclusive) when one is given.
    """
    records: list[PublicationRecord] = []
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        rec = _parse_line(raw, lineno)
        if rec.id in seen:
            raise DataError(
                f"duplicate publication id {rec.id!r} (first seen on line {seen[rec.id]})",
                line=lineno,
            )
        if year_range is not None and not (year_range[0] <= rec.year <= year_range[1]):
            raise DataError(
                f"record {rec.id!r} has year {rec.year} outside {year_range[0]}-{year_range[1]}",
                line=lineno,
            )
        seen[rec.id] = lineno
        records.append(rec)
    return records


def read_publications(path, year_range=None) -> list[PublicationRecord]:
    with open(path, encoding="utf-8") as fh:
        return parse_publications(fh, year_range)


def write_publications(records: Iterable[PublicationRecord], fh) -> None:
    for rec in records:
        obj = {"id": rec.id, "year": rec.year, "authors": list(rec.authors), "skills": list(rec.skills)}
        fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class CollaborationNetwork:
    """Weighted undirected co-authorship graph with per-scholar skills.

    ``adjacency[a][b]`` is the number of co-authored publications. Instances
    are treated as immutable once built.
    """

    vertices: tuple[str, ...]
    adjacency: Mapping[str, Mapping[str, int]]
    skills: Mapping[str, frozenset[str]]
    skill_vocabulary: tuple[str, ...]
    _skill_pos: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_skill_pos", {s: i for i, s in enumerate(self.skill_vocabulary)})

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[str, str] | tuple[str, str, int]],
        skills: Mapping[str, Iterable[str]] | None = None,
        vertices: Iterable[str] = (),
    ) -> "CollaborationNetwork":
        """Build a network from explicit ``(a, b[, weight])`` edges.

        Repeated edges accumulate weight. Skill vocabulary is the sorted
        set of labels in ``skills``.
        """
        adj: dict[str, dict[str, int]] = {v: {} for v in vertices}
        for e in edges:
            a, b = e[0], e[1]
            w = e[2] if len(e) > 2 else 1
            if a == b:
                raise DataError(f"self-edge on {a!r}")
            if w < 1:
                raise DataError(f"edge ({a!r}, {b!r}) has weight {w} < 1")
            adj.setdefault(a, {})
            adj.setdefault(b, {})
            adj[a][b] = adj[a].get(b, 0) + w
            adj[b][a] = adj[b].get(a, 0) + w
        skill_map = {v: frozenset() for v in adj}
        for v, labels in (skills or {}).items():
            adj.setdefault(v, {})
            skill_map[v] = frozenset(labels)
        vocab = tuple(sorted(set().union(*skill_map.values()))) if skill_map else ()
        return cls._freeze(adj, skill_map, vocab)

    @classmethod
    def _freeze(cls, adj, skill_map, vocab):
        verts = tuple(sorted(adj))
        adjacency = {v: dict(sorted(adj[v].items())) for v in verts}
        skills = {v: frozenset(skill_map.get(v, ())) for v in verts}
        return cls(verts, adjacency, skills, tuple(vocab))

    def __contains__(self, v) -> bool:
        return v in self.adjacency

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def n_skills(self) -> int:
        return len(self.skill_vocabulary)

    def neighbors(self, v: str) -> Mapping[str, int]:
        try:
            return self.adjacency[v]
        except KeyError:
            raise DataError(f"unknown scholar {v!r}") from None

    def weight(self, a: str, b: str) -> int:
        return self.neighbors(a).get(b, 0)

    def has_edge(self, a: str, b: str) -> bool:
        return b in self.neighbors(a)

    def degree(self, v: str) -> int:
        return len(self.neighbors(v))

    def edges(self) -> Iterator[tuple[str, str, int]]:
        """Yield each edge once as ``(a, b, weight)`` with ``a < b``."""
        for a in self.vertices:
            for b, w in self.adjacency[a].items():
                if a < b:
                    yield a, b, w

    @property
    def n_edges(self) -> int:
        return sum(len(nb) for nb in self.adjacency.values()) // 2

    def skill_index(self, label: str) -> int:
        """1-based index of ``label`` in the vocabulary (0 is reserved)."""
        return self._skill_pos[label] + 1

    def with_edge(self, a: str, b: str, weight: int = 1) -> "CollaborationNetwork":
        """Copy of the network with ``weight`` added on edge (a, b)."""
        return CollaborationNetwork.from_edges(
            [*self.edges(), (a, b, weight)], skills=self.skills, vertices=self.vertices
        )

    def summary(self) -> dict[str, int]:
        return {
            "vertices": len(self.vertices),
            "edges": self.n_edges,
            "total_weight": sum(w for _, _, w in self.edges()),
            "skills": self.n_skills,
        }


def build_network(
    pubs: Iterable[PublicationRecord],
    window: tuple[int, int] | None = None,
    max_skills: int = DEFAULT_MAX_SKILLS,
) -> CollaborationNetwork:
    """Collaboration network over publications whose year lies in ``window``.

    Edge weight is the number of in-window co-authored publications. The
    skill vocabulary keeps the ``max_skills`` labels held by the most
    scholars (ties broken alphabetically); other labels are dropped.
    """
    if window is not None and window[0] > window[1]:
        raise ParameterError(f"empty year window {window[0]}-{window[1]}")
    if max_skills < 0:
        raise ParameterError("max_skills must be non-negative")

    adj: dict[str, dict[str, int]] = {}
    raw_skills: dict[str, set[str]] = {}
    for rec in pubs:
        if window is not None and not (window[0] <= rec.year <= window[1]):
            continue
        for a in rec.authors:
            adj.setdefault(a, {})
            raw_skills.setdefault(a, set()).update(rec.skills)
        for a, b in combinations(rec.authors, 2):
            adj[a][b] = adj[a].get(b, 0) + 1
            adj[b][a] = adj[b].get(a, 0) + 1

    counts = Counter(label for labels in raw_skills.values() for label in labels)
    ranked = sorted(counts, key=lambda s: (-counts[s], s))[:max_skills]
    keep = set(ranked)
    skill_map = {v: frozenset(s & keep) for v, s in raw_skills.items()}
    return CollaborationNetwork._freeze(adj, skill_map, sorted(keep))


@dataclass(frozen=True)
class Team:
    team_id: str
    members: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.members)) != len(self.members):
            raise DataError(f"team {self.team_id!r} lists a member twice")

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    def without(self, member: str) -> tuple[str, ...]:
        return tuple(m for m in self.members if m != member)

    def replace(self, old: str, new: str) -> "Team":
        return Team(self.team_id, tuple(new if m == old else m for m in self.members))


def parse_teams(
    rows: Iterable[Sequence[str]],
    network: CollaborationNetwork,
    min_size: int = MIN_TEAM_SIZE,
    max_size: int = MAX_TEAM_SIZE,
) -> list[Team]:
    """Group ``(team_id, member_id)`` rows into teams in first-seen order."""
    grouped: dict[str, list[str]] = {}
    for lineno, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise DataError(f"expected 2 columns, got {len(row)}", line=lineno)
        tid, mid = (c.strip() for c in row)
        if mid not in network:
            raise DataError(f"team {tid!r}: member {mid!r} is not in the network", line=lineno)
        members = grouped.setdefault(tid, [])
        if mid in members:
            raise DataError(f"team {tid!r}: member {mid!r} listed twice", line=lineno)
        members.append(mid)

    teams = []
    for tid, members in grouped.items():
        if not (min_size <= len(members) <= max_size):
            logger.warning(
                "skipping team %s: size %d outside [%d, %d]", tid, len(members), min_size, max_size
            )
            continue
        teams.append(Team(tid, tuple(members)))
    return teams


def load_teams(path, network, min_size=MIN_TEAM_SIZE, max_size=MAX_TEAM_SIZE) -> list[Team]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["team_id", "member_id"]:
            raise DataError("team file must start with header team_id,member_id", line=1)
        return parse_teams(reader, network, min_size, max_size)


def write_teams(teams: Iterable[Team], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["team_id", "member_id"])
    for team in teams:
        for m in team.members:
            w.writerow([team.team_id, m])
