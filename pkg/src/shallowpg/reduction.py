"""From a game with an elimination forest to a game with a shallow tree-model.

For every childless forest vertex ``v`` the ancestors of ``v`` get two copies
each: a *choose* copy that picks an outgoing edge and an *execute* copy that
takes it. Groups are merged bottom-up following the forest, and choose copies
of the same original vertex are joined into a clique when their groups meet.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

from .core import Arena, FormatError, ParityGame, Player, WinnerPartition
from .scw import solve_scw
from .treedepth import EliminationForest, find_forest, tree_depth, validate_forest
from .treemodel import TreeModel, induce_arena


class Kind(enum.Enum):
    CHOOSE = "choose"
    EXECUTE = "execute"


@dataclass(frozen=True)
class CopyId:
    """Copy of ``original`` in the group of the childless vertex ``group``."""

    kind: Kind
    original: int
    group: int


def color_id(kind: Kind, player: Player, depth: int, height: int) -> int:
    """Colour ``<kind, player, depth>``; blocks of ``height + 1`` depths."""
    block = (0 if kind is Kind.CHOOSE else 2) + player.value
    return block * (height + 1) + depth


def reduced_palette(height: int) -> tuple[Player, ...]:
    out = []
    for kind in (Kind.CHOOSE, Kind.EXECUTE):
        for player in (Player.E, Player.O):
            out += [player] * (height + 1)
    return tuple(out)


def color_name(c: int, height: int) -> str:
    block, depth = divmod(c, height + 1)
    kind = "o" if block < 2 else ">"
    return f"<{kind},{Player(block % 2).name},{depth}>"


@dataclass(frozen=True)
class ReductionResult:
    game: ParityGame
    tree_model: TreeModel
    copies: tuple[CopyId, ...]
    height: int
    original: ParityGame

    @cached_property
    def index(self) -> dict[CopyId, int]:
        return {c: i for i, c in enumerate(self.copies)}

    @property
    def palette(self) -> tuple[Player, ...]:
        return self.tree_model.palette

    def choose_copies(self, v: int) -> list[int]:
        return [i for i, c in enumerate(self.copies) if c.kind is Kind.CHOOSE and c.original == v]


def reduce(game: ParityGame, forest: EliminationForest) -> ReductionResult:
    check = validate_forest(game.arena, forest)
    if not check:
        raise ValueError("invalid elimination forest: " + "; ".join(check.problems))
    height = forest.height
    depth = forest.depth

    copies: list[CopyId] = []
    groups: dict[int, list[int]] = {}
    for v in forest.childless:
        ids = []
        for w in forest.ancestors(v):
            for kind in (Kind.CHOOSE, Kind.EXECUTE):
                ids.append(len(copies))
                copies.append(CopyId(kind, w, v))
        groups[v] = ids

    def colour(c: CopyId) -> int:
        return color_id(c.kind, game.owner[c.original], depth[c.original], height)

    leaves = {i: colour(c) for i, c in enumerate(copies)}
    rank = [
        game.rank[c.original] + 2
        if c.kind is Kind.EXECUTE
        else (1 if game.owner[c.original] is Player.E else 0)
        for c in copies
    ]

    nodes: dict[int, tuple[int, tuple[int, ...]]] = {}
    pairs: dict[int, frozenset[tuple[int, int]]] = {}
    nxt = len(copies)

    def new_node(level: int, children, ps=()) -> int:
        nonlocal nxt
        u, nxt = nxt, nxt + 1
        nodes[u] = (level, tuple(children))
        pairs[u] = frozenset(ps)
        return u

    def clique(u: int) -> tuple[int, int]:
        c = color_id(Kind.CHOOSE, game.owner[u], depth[u], height)
        return (c, c)

    # top[u]: the node at level height - depth(u) + 1 holding u's subtree.
    top: dict[int, int] = {}
    for v in forest.childless:
        anc = forest.ancestors(v)
        level1 = set()
        for w in anc:
            p, x = game.owner[w], depth[w]
            level1.add((color_id(Kind.CHOOSE, p, x, height), color_id(Kind.EXECUTE, p, x, height)))
        on_path = set(anc)
        for w in anc:
            for w2 in game.successors[w]:
                if w2 in on_path:
                    level1.add(
                        (
                            color_id(Kind.EXECUTE, game.owner[w], depth[w], height),
                            color_id(Kind.CHOOSE, game.owner[w2], depth[w2], height),
                        )
                    )
        merge_level = height - depth[v] + 1
        if merge_level == 1:
            level1.add(clique(v))
        u = new_node(1, groups[v], level1)
        for lvl in range(2, merge_level + 1):
            u = new_node(lvl, [u], [clique(v)] if lvl == merge_level else [])
        top[v] = u
    for x in range(height - 1, -1, -1):
        for u in range(game.n):
            if depth[u] == x and forest.children[u]:
                top[u] = new_node(height - x + 1, [top[c] for c in forest.children[u]], [clique(u)])
    new_node(height + 2, [top[r] for r in forest.roots])

    tm = TreeModel(height + 2, reduced_palette(height), leaves, nodes, pairs)
    arena, _ = induce_arena(tm)
    reduced = ParityGame(arena, tuple(rank))
    return ReductionResult(reduced, tm, tuple(copies), height, game)


def direct_arena(result: ReductionResult) -> Arena:
    """The reduced arena built straight from the copy rules, bypassing the model."""
    forest_anc: dict[int, set[int]] = {}
    for c in result.copies:
        forest_anc.setdefault(c.group, set()).add(c.original)
    idx = result.index
    g = result.original
    below: dict[int, list[int]] = {}
    for c in result.copies:
        if c.kind is Kind.CHOOSE:
            below.setdefault(c.original, []).append(c.group)
    edges = set()
    for c, i in idx.items():
        if c.kind is Kind.CHOOSE:
            edges.add((i, idx[CopyId(Kind.EXECUTE, c.original, c.group)]))
            for grp in below[c.original]:
                edges.add((i, idx[CopyId(Kind.CHOOSE, c.original, grp)]))
        else:
            for w2 in g.successors[c.original]:
                if w2 in forest_anc[c.group]:
                    edges.add((i, idx[CopyId(Kind.CHOOSE, w2, c.group)]))
    owner = [g.owner[c.original] for c in result.copies]
    return Arena.build(owner, edges)


def map_winners(result: ReductionResult, reduced: WinnerPartition) -> WinnerPartition:
    if len(reduced) != len(result.copies):
        raise ValueError(f"expected {len(result.copies)} reduced winners, got {len(reduced)}")
    g = result.original
    out = []
    for v in g.arena.vertices:
        won = [reduced[i] is Player.E for i in result.choose_copies(v)]
        e_wins = any(won) if g.owner[v] is Player.E else all(won)
        out.append(Player.E if e_wins else Player.O)
    return WinnerPartition(tuple(out))


def solve_treedepth(game: ParityGame, forest: EliminationForest | None = None) -> WinnerPartition:
    if forest is None:
        forest = find_forest(game.arena, tree_depth(game.arena))
    result = reduce(game, forest)
    return map_winners(result, solve_scw(result.game, result.tree_model))


# --- copy map text format ---------------------------------------------------


def serialize_copy_map(result: ReductionResult) -> str:
    return "\n".join(
        f"{i} {c.kind.value} {c.original} {c.group}" for i, c in enumerate(result.copies)
    )


def parse_copy_map(text: str) -> list[CopyId]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(f"expected '<copy> <kind> <original> <group>', got {line!r}", lineno)
        try:
            i, kind, orig, grp = int(parts[0]), Kind(parts[1]), int(parts[2]), int(parts[3])
        except ValueError:
            raise FormatError(f"malformed copy-map line {line!r}", lineno) from None
        if i != len(out):
            raise FormatError(f"copy ids must be consecutive, expected {len(out)}", lineno)
        out.append(CopyId(kind, orig, grp))
    return out
