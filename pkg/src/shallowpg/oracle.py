"""Ground truth for the dynamic programme.

* :func:`solve_zielonka` — the classical recursive solver.
* :func:`solve_exhaustive` — positional strategies of both players enumerated;
  only usable on tiny games, it exists to check the recursive solver.
* Stop-game semantics for a fixed positional strategy of E:
  :func:`enforcement_of`, :func:`is_safe`, and :func:`reference_valid_floor`.

Dead ends follow the usual convention for finite plays: a play stuck at a
vertex of O is won by E and one stuck at a vertex of E is won by O.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from math import prod
from typing import Iterator, Mapping

from .core import Coloring, ParityGame, Player, WinnerPartition
from .enforcement import Enforcement, EnforcementSet, min_preceq, up_closure

ENUMERATION_LIMIT = 10**6


class _Stop:
    __slots__ = ()

    def __repr__(self) -> str:
        return "STOP"


STOP = _Stop()


@dataclass(frozen=True)
class PositionalStopStrategy:
    """One move (a successor or :data:`STOP`) for every E-vertex."""

    moves: tuple[tuple[int, int | _Stop], ...]

    @classmethod
    def of(cls, mapping: Mapping[int, int | _Stop]) -> PositionalStopStrategy:
        return cls(tuple(sorted(mapping.items())))

    def __getitem__(self, v: int) -> int | _Stop:
        for u, m in self.moves:
            if u == v:
                return m
        raise KeyError(v)

    def as_dict(self) -> dict[int, int | _Stop]:
        return dict(self.moves)

    def check(self, game: ParityGame) -> None:
        table = self.as_dict()
        for v in game.arena.vertices:
            if game.owner[v] is not Player.E:
                if v in table:
                    raise ValueError(f"strategy assigns a move to O-vertex {v}")
                continue
            if v not in table:
                raise ValueError(f"strategy has no move for E-vertex {v}")
            m = table[v]
            if m is not STOP and m not in game.successors[v]:
                raise ValueError(f"move {v}->{m} is not an edge")


# --- classical solver -------------------------------------------------------


def _attractor(owner, succ, sub: set[int], target: set[int], player: Player) -> set[int]:
    attr = set(target)
    pred: dict[int, list[int]] = {u: [] for u in sub}
    remaining = {}
    for u in sub:
        inside = [w for w in succ[u] if w in sub]
        remaining[u] = len(inside)
        for w in inside:
            pred[w].append(u)
    queue = deque(attr)
    while queue:
        w = queue.popleft()
        for u in pred[w]:
            if u in attr:
                continue
            remaining[u] -= 1
            if owner[u] is player or remaining[u] == 0:
                attr.add(u)
                queue.append(u)
    return attr


def _zielonka(total, sub: set[int]) -> tuple[set[int], set[int]]:
    owner, rank, succ = total
    if not sub:
        return set(), set()
    top = max(rank[u] for u in sub)
    player = Player.E if top % 2 == 0 else Player.O
    a = _attractor(owner, succ, sub, {u for u in sub if rank[u] == top}, player)
    w_e, w_o = _zielonka(total, sub - a)
    w_opp = w_o if player is Player.E else w_e
    if not w_opp:
        return (set(sub), set()) if player is Player.E else (set(), set(sub))
    b = _attractor(owner, succ, sub, w_opp, player.opponent)
    w_e, w_o = _zielonka(total, sub - b)
    if player is Player.E:
        return w_e, w_o | b
    return w_e | b, w_o


def solve_zielonka(game: ParityGame) -> WinnerPartition:
    n = game.n
    # Dead ends are sent to a sink that the stuck player loses: E-sink has
    # rank 0, O-sink rank 1, both self-looping.
    sink_e, sink_o = n, n + 1
    owner = list(game.owner) + [Player.E, Player.O]
    rank = list(game.rank) + [0, 1]
    succ: list[tuple[int, ...]] = []
    for v in range(n):
        s = game.successors[v]
        if not s:
            s = (sink_o,) if game.owner[v] is Player.E else (sink_e,)
        succ.append(s)
    succ += [(sink_e,), (sink_o,)]
    w_e, _ = _zielonka((owner, rank, succ), set(range(n + 2)))
    return WinnerPartition(tuple(Player.E if v in w_e else Player.O for v in range(n)))


# --- exhaustive solver ------------------------------------------------------


def _choices(game: ParityGame, player: Player) -> list[tuple[int, tuple[int, ...]]]:
    return [
        (v, game.successors[v])
        for v in game.arena.vertices
        if game.owner[v] is player and game.successors[v]
    ]


def _positional(game: ParityGame, player: Player) -> Iterator[dict[int, int]]:
    opts = _choices(game, player)
    if prod(len(s) for _, s in opts) > ENUMERATION_LIMIT:
        raise ValueError("too many positional strategies to enumerate")
    for combo in product(*(s for _, s in opts)):
        yield {v: w for (v, _), w in zip(opts, combo)}


def play_winner(game: ParityGame, move: Mapping[int, int], v: int) -> Player:
    """Winner of the unique play from ``v`` when every vertex follows ``move``."""
    seen: dict[int, int] = {}
    path: list[int] = []
    u = v
    while u not in seen:
        if not game.successors[u]:
            return Player.O if game.owner[u] is Player.E else Player.E
        seen[u] = len(path)
        path.append(u)
        u = move[u]
    top = max(game.rank[x] for x in path[seen[u]:])
    return Player.E if top % 2 == 0 else Player.O


def solve_exhaustive(game: ParityGame) -> WinnerPartition:
    e_strats = list(_positional(game, Player.E))
    o_strats = list(_positional(game, Player.O))
    if len(e_strats) * len(o_strats) > ENUMERATION_LIMIT:
        raise ValueError("too many strategy pairs to enumerate")
    win = []
    for v in game.arena.vertices:
        e_wins = any(
            all(play_winner(game, {**se, **so}, v) is Player.E for so in o_strats)
            for se in e_strats
        )
        win.append(Player.E if e_wins else Player.O)
    return WinnerPartition(tuple(win))


def wins_normal_game(game: ParityGame, strategy: Mapping[int, int], v: int) -> bool:
    """Does a STOP-free positional strategy of E win from ``v`` in the ordinary game?"""
    return all(
        play_winner(game, {**strategy, **so}, v) is Player.E
        for so in _positional(game, Player.O)
    )


# --- stop-game semantics ----------------------------------------------------


def _restricted_successors(game: ParityGame, strategy: PositionalStopStrategy):
    table = strategy.as_dict()

    def succ(u: int) -> tuple[int, ...]:
        if game.owner[u] is Player.E:
            m = table[u]
            return () if m is STOP else (m,)
        return game.successors[u]

    return succ, table


def enforcement_of(
    game: ParityGame, coloring: Coloring, strategy: PositionalStopStrategy, v: int
) -> Enforcement:
    """Worst arrivals per colour for plays from ``v`` consistent with ``strategy``.

    Explores states (vertex, max rank so far); E-vertices count only where the
    strategy stops.
    """
    strategy.check(game)
    succ, table = _restricted_successors(game, strategy)
    start = (v, game.rank[v])
    seen = {start}
    queue = deque([start])
    while queue:
        u, m = queue.popleft()
        for w in succ(u):
            nxt = (w, max(m, game.rank[w]))
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    values: list[int | None] = [None] * len(coloring.palette)
    for u, m in seen:
        if game.owner[u] is Player.E and table[u] is not STOP:
            continue
        c = coloring.assignment[u]
        values[c] = min_preceq(values[c], m)
    return Enforcement(values)


def _reachable(succ, v: int, allowed=None) -> set[int]:
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in succ(u):
            if (allowed is None or w in allowed) and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_safe(game: ParityGame, strategy: PositionalStopStrategy, v: int) -> bool:
    """No play from ``v`` consistent with ``strategy`` is lost by E.

    With STOP always available the only losing plays are infinite ones, so this
    looks for a reachable cycle whose highest rank is odd.
    """
    strategy.check(game)
    succ, _ = _restricted_successors(game, strategy)
    reach = _reachable(succ, v)
    for r in sorted({game.rank[u] for u in reach if game.rank[u] % 2 == 1}):
        low = {u for u in reach if game.rank[u] <= r}
        for u in low:
            if game.rank[u] != r:
                continue
            if any(u in _reachable(succ, w, low) for w in succ(u) if w in low):
                return False
    return True


def enumerate_positional_stop_strategies(
    game: ParityGame, vertices=None
) -> Iterator[PositionalStopStrategy]:
    """All positional stop strategies; E-vertices ascending, successors then STOP.

    ``vertices`` optionally restricts which E-vertices get a choice; the rest
    are fixed to STOP.
    """
    e_vertices = [u for u in game.arena.vertices if game.owner[u] is Player.E]
    free = [u for u in e_vertices if vertices is None or u in vertices]
    fixed = {u: STOP for u in e_vertices if u not in free}
    options = [list(game.successors[u]) + [STOP] for u in free]
    if prod(len(o) for o in options) > ENUMERATION_LIMIT:
        raise ValueError("too many positional stop strategies to enumerate")
    for combo in product(*options):
        yield PositionalStopStrategy.of({**fixed, **dict(zip(free, combo))})


def reference_valid_floor(
    game: ParityGame, coloring: Coloring, v: int, d: int | None = None
) -> EnforcementSet:
    """Up-closure of the enforcements from ``v`` of all safe positional stop strategies.

    Only E-vertices reachable from ``v`` are varied; the others cannot affect
    plays from ``v``.
    """
    d = game.rank_bound if d is None else d
    reach = _reachable(lambda u: game.successors[u], v)
    seeds = set()
    for strategy in enumerate_positional_stop_strategies(game, reach):
        if is_safe(game, strategy, v):
            seeds.add(enforcement_of(game, coloring, strategy, v))
    return up_closure(seeds, d, len(coloring.palette))
