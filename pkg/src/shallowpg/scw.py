"""Enforcement-set dynamic programme over a tree-model.

Every leaf starts with the up-closure of its own one-colour enforcement. At an
internal node the children's states are united and, for each colour pair
``(s, t)`` of the node (lexicographic order), one update adds the edges from
``s``-coloured to ``t``-coloured present vertices and recomputes every set.

Sets are manipulated through their minimal antichains. The ``*_reference``
updates evaluate the set definitions member by member over the dense space and
serve as the cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import chain
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .core import ParityGame, Player, WinnerPartition, normalize_ranks
from .enforcement import (
    Enforcement,
    EnforcementSet,
    all_enforcements,
    dense_up_closure,
    enf_merge,
    minimize,
    up_closure,
)
from .treemodel import TreeModel, induce_arena


class ModelMismatch(ValueError):
    """The tree-model does not induce the game's arena."""


@dataclass(frozen=True)
class SolverState:
    """Sets for the present vertices of the subgame built so far.

    ``edges`` is the edge set of that subgame; it is only bookkeeping (the
    updates never read it) but lets tests rebuild the exact subgame.
    """

    d: int
    palette: tuple[Player, ...]
    color: Mapping[int, int]
    sets: Mapping[int, EnforcementSet]
    edges: frozenset[tuple[int, int]] = frozenset()

    @property
    def k(self) -> int:
        return len(self.palette)

    @property
    def present(self) -> list[int]:
        return sorted(self.sets)

    def restrict(self, vertices: Iterable[int]) -> SolverState:
        keep = set(vertices)
        return SolverState(
            self.d,
            self.palette,
            {v: c for v, c in self.color.items() if v in keep},
            {v: s for v, s in self.sets.items() if v in keep},
            frozenset(e for e in self.edges if e[0] in keep and e[1] in keep),
        )

    def _targets(self, t: int) -> list[int]:
        return [w for w in self.present if self.color[w] == t]

    def _with_pair(self, s: int, t: int, sets: Mapping[int, EnforcementSet]) -> SolverState:
        src = [v for v in self.present if self.color[v] == s]
        added = {(a, b) for a in src for b in self._targets(t)}
        return replace(self, sets=dict(sets), edges=self.edges | added)


def init_sets(game: ParityGame, tm: TreeModel, d: int | None = None) -> SolverState:
    d = game.rank_bound if d is None else d
    sets = {}
    for v, c in tm.leaves.items():
        r = game.rank[v]
        if r >= d:
            raise ValueError(f"rank {r} of vertex {v} is not below d = {d}")
        sets[v] = up_closure([Enforcement.from_map({c: r}, tm.k)], d, tm.k)
    return SolverState(d, tm.palette, dict(tm.leaves), sets)


def _even_or_undef(p: Enforcement, s: int) -> bool:
    return p[s] is None or p[s] % 2 == 0


def _check_side(palette: Sequence[Player], s: int, side: Player) -> None:
    if palette[s] is not side:
        raise ValueError(f"colour {s} belongs to {palette[s]}, not {side}")


def update_E(state: SolverState, s: int, t: int) -> SolverState:
    """Add edges ``s -> t`` for an E-colour ``s``."""
    _check_side(state.palette, s, Player.E)
    targets = state._targets(t)
    if not targets:
        return state._with_pair(s, t, state.sets)
    move = minimize(m for w in targets for m in state.sets[w].minimal)
    # Minimal elements suffice: anything in MOVE with an even s-value lies
    # above a minimal element whose s-value is even or undefined.
    looped = [m.without(s) for m in move if _even_or_undef(m, s)]
    opt = minimize(chain(move, looped))
    out = {}
    for v, old in state.sets.items():
        merged = [
            enf_merge(Player.E, q, s, r) for q in old.minimal if q[s] is not None for r in opt
        ]
        out[v] = EnforcementSet(state.d, state.k, minimize(chain(old.minimal, merged)))
    return state._with_pair(s, t, out)


def update_O(state: SolverState, s: int, t: int) -> SolverState:
    """Add edges ``s -> t`` for an O-colour ``s``.

    Old enforcements that mention ``s`` survive only through a merge that
    answers every possible O-move into a ``t``-coloured vertex.
    """
    _check_side(state.palette, s, Player.O)
    targets = state._targets(t)
    if not targets:
        return state._with_pair(s, t, state.sets)
    d, k = state.d, state.k
    answers = {
        w: [m for m in state.sets[w].minimal if _even_or_undef(m, s)] for w in targets
    }
    out = {}
    for v, old in state.sets.items():
        acc = [q for q in old.minimal if q[s] is None]
        for q in old.minimal:
            if q[s] is None:
                continue
            common: EnforcementSet | None = None
            for w in targets:
                up = EnforcementSet(
                    d, k, minimize(enf_merge(Player.O, q, s, r) for r in answers[w])
                )
                common = up if common is None else common & up
                if not common:
                    break
            acc.extend(common.minimal)
        out[v] = EnforcementSet(d, k, minimize(acc))
    return state._with_pair(s, t, out)


def update(state: SolverState, s: int, t: int) -> SolverState:
    if state.palette[s] is Player.E:
        return update_E(state, s, t)
    return update_O(state, s, t)


# --- member-by-member reference ---------------------------------------------


def _members(es: EnforcementSet) -> list[Enforcement]:
    return list(es)


def update_E_reference(state: SolverState, s: int, t: int) -> SolverState:
    _check_side(state.palette, s, Player.E)
    d, k = state.d, state.k
    space = list(all_enforcements(d, k))
    bits = {v: es.to_bits() for v, es in state.sets.items()}
    move = np.zeros(len(space), dtype=bool)
    for w in state._targets(t):
        move |= bits[w]
    looped = np.zeros_like(move)
    for i, p in enumerate(space):
        if p[s] is None:
            looped[i] = any(move[p.updated(s, r).index(d)] for r in range(0, d, 2))
    opt = [space[i] for i in np.flatnonzero(move | looped)]
    out = {}
    for v, b in bits.items():
        seeds = b.copy()
        for i in np.flatnonzero(b):
            q = space[i]
            if q[s] is None:
                continue
            for r in opt:
                seeds[enf_merge(Player.E, q, s, r).index(d)] = True
        out[v] = EnforcementSet.from_bits(dense_up_closure(seeds, d, k), d, k)
    return state._with_pair(s, t, out)


def update_O_reference(state: SolverState, s: int, t: int) -> SolverState:
    _check_side(state.palette, s, Player.O)
    d, k = state.d, state.k
    size = (d + 1) ** k
    targets = state._targets(t)
    good = {w: [r for r in _members(state.sets[w]) if _even_or_undef(r, s)] for w in targets}
    out = {}
    for v, es in state.sets.items():
        result = np.zeros(size, dtype=bool)
        for q in _members(es):
            if q[s] is None or not targets:
                seed = np.zeros(size, dtype=bool)
                seed[q.index(d)] = True
                result |= dense_up_closure(seed, d, k)
                continue
            allw = np.ones(size, dtype=bool)
            for w in targets:
                seed = np.zeros(size, dtype=bool)
                for r in good[w]:
                    seed[enf_merge(Player.O, q, s, r).index(d)] = True
                allw &= dense_up_closure(seed, d, k)
            result |= allw
        out[v] = EnforcementSet.from_bits(result, d, k)
    return state._with_pair(s, t, out)


def update_reference(state: SolverState, s: int, t: int) -> SolverState:
    if state.palette[s] is Player.E:
        return update_E_reference(state, s, t)
    return update_O_reference(state, s, t)


# --- tree traversal ---------------------------------------------------------

Update = Callable[[SolverState, int, int], SolverState]
StepHook = Callable[[int, "tuple[int, int] | None", SolverState], None]


def union_states(child_states: Sequence[SolverState]) -> SolverState:
    first = child_states[0]
    sets: dict[int, EnforcementSet] = {}
    color: dict[int, int] = {}
    edges: set[tuple[int, int]] = set()
    for st in child_states:
        if (st.d, st.palette) != (first.d, first.palette):
            raise ValueError("child states disagree on d or palette")
        overlap = sets.keys() & st.sets.keys()
        if overlap:
            raise ValueError(f"overlapping present vertices: {sorted(overlap)}")
        sets.update(st.sets)
        color.update(st.color)
        edges |= st.edges
    return SolverState(first.d, first.palette, color, sets, frozenset(edges))


def lex_pairs(k: int) -> list[tuple[int, int]]:
    return [(s, t) for s in range(k) for t in range(k)]


def process_node(
    child_states: Sequence[SolverState],
    pairs: Iterable[tuple[int, int]],
    *,
    order: Sequence[tuple[int, int]] | None = None,
    step: Update = update,
    on_step: Callable[[tuple[int, int], SolverState], None] | None = None,
) -> SolverState:
    state = union_states(child_states)
    wanted = set(pairs)
    for pair in order if order is not None else lex_pairs(state.k):
        if pair in wanted:
            state = step(state, *pair)
            if on_step is not None:
                on_step(pair, state)
    return state


def check_model(game: ParityGame, tm: TreeModel) -> None:
    arena, _ = induce_arena(tm)
    if arena.n != game.n:
        raise ModelMismatch(f"tree-model has {arena.n} leaves, game has {game.n} vertices")
    if arena.owner != game.owner:
        v = next(i for i, (a, b) in enumerate(zip(arena.owner, game.owner)) if a is not b)
        raise ModelMismatch(f"vertex {v}: colour owner {arena.owner[v]} but game owner {game.owner[v]}")
    if arena.edges != game.edges:
        extra = sorted(arena.edges - game.edges)
        missing = sorted(game.edges - arena.edges)
        detail = f"extra {extra[0]}" if extra else f"missing {missing[0]}"
        raise ModelMismatch(f"induced arena differs from the game's ({detail})")


def run_scw(
    game: ParityGame,
    tm: TreeModel,
    *,
    d: int | None = None,
    order: Sequence[tuple[int, int]] | None = None,
    step: Update = update,
    on_step: StepHook | None = None,
) -> SolverState:
    """Process every node bottom-up and return the root state.

    ``on_step(node, pair, state)`` fires after each leaf initialisation and
    after every update (``pair`` is None for leaves).
    """
    base = init_sets(game, tm, d)
    states: dict[int, SolverState] = {}
    for v in tm.leaves:
        states[v] = base.restrict([v])
        if on_step is not None:
            on_step(v, None, states[v])
    for u in tm.bottom_up():
        hook = None
        if on_step is not None:
            hook = lambda pair, st, u=u: on_step(u, pair, st)  # noqa: E731
        states[u] = process_node(
            [states.pop(ch) for ch in tm.children(u)],
            tm.pairs_at(u),
            order=order,
            step=step,
            on_step=hook,
        )
    return states[tm.root]


def extract_winners(state: SolverState) -> WinnerPartition:
    e_colors = frozenset(c for c, p in enumerate(state.palette) if p is Player.E)
    win = []
    for v in range(len(state.sets)):
        ok = any(not (m.domain & e_colors) for m in state.sets[v].minimal)
        win.append(Player.E if ok else Player.O)
    return WinnerPartition(tuple(win))


def solve_scw(
    game: ParityGame,
    tm: TreeModel,
    *,
    order: Sequence[tuple[int, int]] | None = None,
    step: Update = update,
) -> WinnerPartition:
    check_model(game, tm)
    game = normalize_ranks(game)
    return extract_winners(run_scw(game, tm, order=order, step=step))
