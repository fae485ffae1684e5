"""Parity games, arenas and the PGSolver text format."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

MAX_RANK = 2**16 - 1


class Player(enum.Enum):
    """The two players. ``E`` wants the top recurring rank to be even."""

    E = 0
    O = 1

    @property
    def opponent(self) -> Player:
        return Player.O if self is Player.E else Player.E

    def __str__(self) -> str:
        return self.name


class FormatError(ValueError):
    """Raised for malformed input files; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Arena:
    owner: tuple[Player, ...]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        n = len(self.owner)
        for v, w in self.edges:
            if not (0 <= v < n and 0 <= w < n):
                raise ValueError(f"edge ({v}, {w}) leaves the vertex range 0..{n - 1}")

    @classmethod
    def build(cls, owner: Sequence[Player], edges: Iterable[tuple[int, int]]) -> Arena:
        return cls(tuple(owner), frozenset((int(v), int(w)) for v, w in edges))

    @property
    def n(self) -> int:
        return len(self.owner)

    @property
    def vertices(self) -> range:
        return range(len(self.owner))

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in self.owner]
        for v, w in self.edges:
            out[v].append(w)
        return tuple(tuple(sorted(s)) for s in out)

    @cached_property
    def predecessors(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in self.owner]
        for v, w in self.edges:
            inc[w].append(v)
        return tuple(tuple(sorted(s)) for s in inc)

    def neighbours(self, v: int) -> set[int]:
        """Undirected neighbourhood of ``v`` (self excluded)."""
        return (set(self.successors[v]) | set(self.predecessors[v])) - {v}


@dataclass(frozen=True)
class ParityGame:
    arena: Arena
    rank: tuple[int, ...]
    names: tuple[str | None, ...] | None = None

    def __post_init__(self):
        if len(self.rank) != self.arena.n:
            raise ValueError("rank must be defined for every vertex")
        if any(r < 0 for r in self.rank):
            raise ValueError("ranks must be non-negative")
        if self.names is not None and len(self.names) != self.arena.n:
            raise ValueError("names must cover every vertex")

    @classmethod
    def build(
        cls,
        owner: Sequence[Player],
        rank: Sequence[int],
        edges: Iterable[tuple[int, int]],
    ) -> ParityGame:
        return cls(Arena.build(owner, edges), tuple(int(r) for r in rank))

    @property
    def n(self) -> int:
        return self.arena.n

    @property
    def owner(self) -> tuple[Player, ...]:
        return self.arena.owner

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self.arena.edges

    @property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        return self.arena.successors

    @property
    def rank_bound(self) -> int:
        """Smallest ``d`` with every rank in ``0..d-1``."""
        return max(self.rank, default=-1) + 1

    def with_ranks(self, rank: Sequence[int]) -> ParityGame:
        return ParityGame(self.arena, tuple(rank), self.names)


@dataclass(frozen=True)
class Coloring:
    """Player-aware colouring: ``palette[c]`` is the player owning colour ``c``."""

    palette: tuple[Player, ...]
    assignment: tuple[int, ...]

    def check_player_aware(self, arena: Arena) -> None:
        for v, c in enumerate(self.assignment):
            if not 0 <= c < len(self.palette):
                raise ValueError(f"vertex {v} has unknown colour {c}")
            if self.palette[c] is not arena.owner[v]:
                raise ValueError(
                    f"vertex {v} belongs to {arena.owner[v]} but colour {c} to {self.palette[c]}"
                )


@dataclass(frozen=True)
class WinnerPartition:
    winner: tuple[Player, ...]

    def __getitem__(self, v: int) -> Player:
        return self.winner[v]

    def __len__(self) -> int:
        return len(self.winner)

    def region(self, player: Player) -> frozenset[int]:
        return frozenset(v for v, p in enumerate(self.winner) if p is player)

    def lines(self) -> list[str]:
        return [f"{v} {p}" for v, p in enumerate(self.winner)]


# --- PGSolver format --------------------------------------------------------

_HEADER = re.compile(r"^parity\s+(-?\d+)\s*;?$")
_NAME = re.compile(r'\s+"((?:[^"\\]|\\.)*)"$')


def parse_pg(text: str) -> ParityGame:
    """Parse a PGSolver file.

    Ids must be dense ``0..n-1`` (any order). The header value is treated as an
    upper bound on vertex ids; both the ``max id`` and the ``vertex count``
    conventions are therefore accepted.
    """
    header: int | None = None
    header_line = 0
    rows: dict[int, tuple[int, Player, tuple[int, ...], str | None, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("parity"):
            if header is not None or rows:
                raise FormatError("malformed header: header must come first", lineno)
            m = _HEADER.match(line)
            if not m or int(m.group(1)) < 0:
                raise FormatError(f"malformed header {line!r}", lineno)
            header, header_line = int(m.group(1)), lineno
            continue
        if not line.endswith(";"):
            raise FormatError("vertex line must end with ';'", lineno)
        body = line[:-1].rstrip()
        name = None
        m = _NAME.search(body)
        if m:
            name = m.group(1)
            body = body[: m.start()]
        parts = body.split()
        if len(parts) not in (3, 4):
            raise FormatError(f"expected '<id> <rank> <owner> [succs]', got {line!r}", lineno)
        try:
            vid, rank, own = (int(p) for p in parts[:3])
            succ = tuple(int(s) for s in parts[3].split(",") if s) if len(parts) == 4 else ()
        except ValueError:
            raise FormatError(f"non-integer field in {line!r}", lineno) from None
        if vid < 0:
            raise FormatError(f"negative vertex id {vid}", lineno)
        if vid in rows:
            raise FormatError(f"duplicate vertex id {vid}", lineno)
        if rank < 0:
            raise FormatError(f"negative rank {rank} for vertex {vid}", lineno)
        if rank > MAX_RANK:
            raise FormatError(f"rank {rank} exceeds 16-bit bound", lineno)
        if own not in (0, 1):
            raise FormatError(f"owner must be 0 or 1, got {own}", lineno)
        rows[vid] = (rank, Player(own), succ, name, lineno)

    n = len(rows)
    if header is not None and rows and max(rows) > header:
        raise FormatError(
            f"malformed header: max id {max(rows)} exceeds declared bound {header}", header_line
        )
    for vid, (_, _, succ, _, lineno) in rows.items():
        for w in succ:
            if w not in rows:
                raise FormatError(f"unknown successor {w} of vertex {vid}", lineno)
    missing = sorted(set(range(n)) - rows.keys())
    if missing:
        raise FormatError(f"vertex ids must be dense, missing {missing[0]}")

    owner = [rows[v][1] for v in range(n)]
    rank = [rows[v][0] for v in range(n)]
    edges = [(v, w) for v in range(n) for w in rows[v][2]]
    names = tuple(rows[v][3] for v in range(n))
    game = ParityGame.build(owner, rank, edges)
    if any(x is not None for x in names):
        game = ParityGame(game.arena, game.rank, names)
    return game


def serialize_pg(game: ParityGame) -> str:
    lines = [f"parity {game.n};"]
    for v in game.arena.vertices:
        fields = [str(v), str(game.rank[v]), str(game.owner[v].value)]
        if game.successors[v]:
            fields.append(",".join(map(str, game.successors[v])))
        line = " ".join(fields)
        if game.names is not None and game.names[v] is not None:
            line += f' "{game.names[v]}"'
        lines.append(line + ";")
    return "\n".join(lines)


def normalize_ranks(game: ParityGame) -> ParityGame:
    """Compress ranks order- and parity-preservingly.

    Distinct ranks are visited in ascending order; each gets the smallest value
    above the previous one that has its own parity.
    """
    table: dict[int, int] = {}
    last = -1
    for r in sorted(set(game.rank)):
        nxt = last + 1
        if nxt % 2 != r % 2:
            nxt += 1
        table[r] = last = nxt
    return game.with_ranks([table[r] for r in game.rank])

