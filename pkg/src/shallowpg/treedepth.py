"""Elimination forests and exact tree-depth.

Heights are counted in edges: a single vertex has tree-depth 0, one less than
the classical convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

from .core import Arena, FormatError

TD_LIMIT = 20


@dataclass(frozen=True)
class EliminationForest:
    """``parent[v]`` is the parent of ``v``, or None for roots."""

    parent: tuple[int | None, ...]

    def __post_init__(self):
        n = len(self.parent)
        for v, p in enumerate(self.parent):
            if p is not None and not 0 <= p < n:
                raise ValueError(f"parent {p} of vertex {v} is not a vertex")

    @property
    def n(self) -> int:
        return len(self.parent)

    def find_cycle(self) -> list[int] | None:
        state = [0] * self.n  # 0 new, 1 on stack, 2 done
        for start in range(self.n):
            path, v = [], start
            while v is not None and state[v] == 0:
                state[v] = 1
                path.append(v)
                v = self.parent[v]
            if v is not None and state[v] == 1:
                return path[path.index(v):]
            for u in path:
                state[u] = 2
        return None

    @cached_property
    def depth(self) -> tuple[int, ...]:
        if self.find_cycle() is not None:
            raise ValueError("parent relation has a cycle")
        return tuple(len(self.ancestors(v)) - 1 for v in range(self.n))

    @property
    def height(self) -> int:
        return max(self.depth, default=0)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for v, p in enumerate(self.parent):
            if p is not None:
                out[p].append(v)
        return tuple(tuple(c) for c in out)

    @property
    def roots(self) -> list[int]:
        return [v for v, p in enumerate(self.parent) if p is None]

    def ancestors(self, v: int) -> list[int]:
        """Ancestors of ``v`` from the root down, ``v`` included."""
        out = []
        u: int | None = v
        while u is not None:
            out.append(u)
            if len(out) > self.n:
                raise ValueError("parent relation has a cycle")
            u = self.parent[u]
        return out[::-1]

    def is_ancestor(self, u: int, v: int) -> bool:
        return u in self.ancestors(v)

    @property
    def childless(self) -> list[int]:
        return [v for v in range(self.n) if not self.children[v]]


@dataclass(frozen=True)
class ForestCheck:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def validate_forest(arena: Arena, forest: EliminationForest) -> ForestCheck:
    if forest.n != arena.n:
        return ForestCheck(False, [f"forest has {forest.n} vertices, arena has {arena.n}"])
    cycle = forest.find_cycle()
    if cycle is not None:
        return ForestCheck(False, ["cycle in parent relation: " + " -> ".join(map(str, cycle))])
    problems = []
    anc = [set(forest.ancestors(v)) for v in range(forest.n)]
    for v, w in sorted(arena.edges):
        if v not in anc[w] and w not in anc[v]:
            problems.append(f"edge {v}->{w} joins vertices that are not ancestor-related")
    return ForestCheck(not problems, problems)


# --- exact tree-depth -------------------------------------------------------


def _adjacency(arena: Arena) -> tuple[int, ...]:
    adj = [0] * arena.n
    for v, w in arena.edges:
        if v != w:
            adj[v] |= 1 << w
            adj[w] |= 1 << v
    return tuple(adj)


def _components(adj: Sequence[int], mask: int) -> list[int]:
    comps = []
    rest = mask
    while rest:
        low = rest & -rest
        comp, frontier = low, low
        while frontier:
            nb = 0
            f = frontier
            while f:
                b = f & -f
                nb |= adj[b.bit_length() - 1]
                f ^= b
            frontier = nb & mask & ~comp
            comp |= frontier
        comps.append(comp)
        rest &= ~comp
    return comps


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        b = mask & -mask
        out.append(b.bit_length() - 1)
        mask ^= b
    return out


class _Solver:
    def __init__(self, arena: Arena):
        if arena.n > TD_LIMIT:
            raise ValueError(f"tree-depth recursion limited to {TD_LIMIT} vertices, got {arena.n}")
        self.adj = _adjacency(arena)
        self.connected = lru_cache(maxsize=None)(self._connected)

    def td(self, mask: int) -> int:
        """Tree-depth of the subgraph on ``mask``; -1 for the empty graph."""
        if not mask:
            return -1
        return max(self.connected(c) for c in _components(self.adj, mask))

    def _connected(self, comp: int) -> int:
        if comp & (comp - 1) == 0:
            return 0
        best = None
        for v in _bits(comp):
            sub = self.td(comp & ~(1 << v))
            if best is None or sub < best:
                best = sub
                if best == 0:
                    break
        return 1 + best


def tree_depth(arena: Arena) -> int:
    if arena.n == 0:
        raise ValueError("tree-depth of the empty arena is undefined")
    return _Solver(arena).td((1 << arena.n) - 1)


def find_forest(arena: Arena, k: int) -> EliminationForest | None:
    """A forest of height at most ``k``, peeling the lowest-id admissible root."""
    solver = _Solver(arena)
    full = (1 << arena.n) - 1
    if arena.n == 0 or solver.td(full) > k:
        return None
    parent: list[int | None] = [None] * arena.n

    def build(comp: int, budget: int, above: int | None) -> None:
        if comp & (comp - 1) == 0:
            parent[comp.bit_length() - 1] = above
            return
        for v in _bits(comp):
            rest = comp & ~(1 << v)
            if solver.td(rest) <= budget - 1:
                parent[v] = above
                for c in _components(solver.adj, rest):
                    build(c, budget - 1, v)
                return
        raise AssertionError("no admissible root despite tree-depth bound")

    for comp in _components(solver.adj, full):
        build(comp, k, None)
    return EliminationForest(tuple(parent))


# --- text format ------------------------------------------------------------


def parse_forest(text: str) -> EliminationForest:
    rows: dict[int, int | None] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not line.endswith(";"):
            raise FormatError("line must end with ';'", lineno)
        parts = line[:-1].split()
        if len(parts) != 2:
            raise FormatError(f"expected '<vertex> <parent|-1>;', got {line!r}", lineno)
        try:
            v, p = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"non-integer field in {line!r}", lineno) from None
        if v < 0 or p < -1:
            raise FormatError(f"negative id in {line!r}", lineno)
        if v in rows:
            raise FormatError(f"duplicate vertex {v}", lineno)
        rows[v] = None if p == -1 else p
    n = len(rows)
    if sorted(rows) != list(range(n)):
        raise FormatError("forest vertices must be 0..n-1")
    for v, p in rows.items():
        if p is not None and p not in rows:
            raise FormatError(f"parent {p} of {v} is not a vertex")
    return EliminationForest(tuple(rows[v] for v in range(n)))


def serialize_forest(forest: EliminationForest) -> str:
    return "\n".join(f"{v} {-1 if p is None else p};" for v, p in enumerate(forest.parent))
