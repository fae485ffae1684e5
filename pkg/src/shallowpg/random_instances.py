"""Seeded generators for games, tree-models and elimination forests."""

from __future__ import annotations

import random

from .core import ParityGame, Player
from .treemodel import TreeModel, induce_arena


def random_game(rng: random.Random, n: int, d: int, density: float = 0.35) -> ParityGame:
    owner = [rng.choice((Player.E, Player.O)) for _ in range(n)]
    rank = [rng.randrange(d) for _ in range(n)]
    edges = [(v, w) for v in range(n) for w in range(n) if rng.random() < density]
    return ParityGame.build(owner, rank, edges)


def random_tree_model(
    rng: random.Random,
    n: int,
    k: int,
    height: int,
    pair_prob: float = 0.3,
) -> TreeModel:
    """A model with ``n`` leaves, ``k`` colours and exactly the given height.

    Each level groups the nodes of the level below into random blocks; the top
    level is a single root.
    """
    if n < 1 or k < 1:
        raise ValueError("need at least one leaf and one colour")
    if height == 0 and n != 1:
        raise ValueError("a height-0 model has exactly one leaf")
    palette = tuple(rng.choice((Player.E, Player.O)) for _ in range(k))
    leaves = {v: rng.randrange(k) for v in range(n)}
    nodes: dict[int, tuple[int, tuple[int, ...]]] = {}
    pairs: dict[int, frozenset[tuple[int, int]]] = {}
    layer = list(range(n))
    nxt = n
    for lvl in range(1, height + 1):
        rng.shuffle(layer)
        if lvl == height:
            groups = [layer]
        else:
            cuts = sorted(rng.sample(range(1, len(layer)), rng.randrange(len(layer)))) if len(layer) > 1 else []
            bounds = [0] + cuts + [len(layer)]
            groups = [layer[a:b] for a, b in zip(bounds, bounds[1:])]
        layer = []
        for g in groups:
            nodes[nxt] = (lvl, tuple(g))
            pairs[nxt] = frozenset(
                (s, t) for s in range(k) for t in range(k) if rng.random() < pair_prob
            )
            layer.append(nxt)
            nxt += 1
    return TreeModel(height, palette, leaves, nodes, pairs)


def game_from_model(rng: random.Random, tm: TreeModel, d: int) -> ParityGame:
    arena, _ = induce_arena(tm)
    rank = tuple(rng.randrange(d) for _ in range(arena.n))
    return ParityGame(arena, rank)


def random_forest(rng: random.Random, n: int, height: int) -> tuple[int | None, ...]:
    """Parent tuple of a random forest on ``0..n-1`` with height at most ``height``."""
    order = list(range(n))
    rng.shuffle(order)
    parent: dict[int, int | None] = {}
    depth: dict[int, int] = {}
    for v in order:
        options = [u for u in parent if depth[u] < height]
        if options and rng.random() < 0.75:
            u = rng.choice(options)
            parent[v], depth[v] = u, depth[u] + 1
        else:
            parent[v], depth[v] = None, 0
    return tuple(parent[v] for v in range(n))


def game_over_forest(
    rng: random.Random, parent: tuple[int | None, ...], d: int, density: float = 0.5
) -> ParityGame:
    """Random game whose edges all join ancestor-related vertices."""
    n = len(parent)
    anc = []
    for v in range(n):
        chain, u = set(), v
        while u is not None:
            chain.add(u)
            u = parent[u]
        anc.append(chain)
    owner = [rng.choice((Player.E, Player.O)) for _ in range(n)]
    rank = [rng.randrange(d) for _ in range(n)]
    edges = [
        (v, w)
        for v in range(n)
        for w in range(n)
        if (w in anc[v] or v in anc[w]) and rng.random() < density
    ]
    return ParityGame.build(owner, rank, edges)
