"""Tree-models: levelled trees with coloured leaves and colour-pair sets.

A tree-model induces an arena bottom-up: at every internal node ``l`` and
pair ``(c, c')`` in its pair set, every leaf below ``l`` coloured ``c`` gets an
edge to every leaf below ``l`` coloured ``c'`` (a self-loop when a leaf plays
both roles). Leaf ids are the vertex ids of the induced arena.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from .core import Arena, Coloring, FormatError, Player


class TreeModelError(ValueError):
    pass


@dataclass(frozen=True)
class TreeModel:
    height: int
    palette: tuple[Player, ...]
    leaves: Mapping[int, int]
    nodes: Mapping[int, tuple[int, tuple[int, ...]]]
    pairs: Mapping[int, frozenset[tuple[int, int]]] = field(default_factory=dict)

    def __post_init__(self):
        # Normalise containers so equality ignores children order.
        object.__setattr__(self, "palette", tuple(self.palette))
        object.__setattr__(self, "leaves", dict(sorted(self.leaves.items())))
        object.__setattr__(
            self,
            "nodes",
            {u: (lvl, tuple(sorted(ch))) for u, (lvl, ch) in sorted(self.nodes.items())},
        )
        object.__setattr__(
            self,
            "pairs",
            {u: frozenset(p) for u, p in sorted(self.pairs.items()) if p},
        )
        self._validate()

    def _validate(self) -> None:
        k = len(self.palette)
        if self.height < 0:
            raise TreeModelError("height must be non-negative")
        clash = set(self.leaves) & set(self.nodes)
        if clash:
            raise TreeModelError(f"id {min(clash)} used for both a leaf and a node")
        for v, c in self.leaves.items():
            if not 0 <= c < k:
                raise TreeModelError(f"unknown color {c} on leaf {v}")
        for u, ps in self.pairs.items():
            if u not in self.nodes:
                raise TreeModelError(f"pairs attached to {u}, which is not an internal node")
            for c, c2 in ps:
                if not (0 <= c < k and 0 <= c2 < k):
                    raise TreeModelError(f"unknown color in pair ({c}, {c2}) at node {u}")
        parent: dict[int, int] = {}
        for u, (lvl, children) in self.nodes.items():
            if not 1 <= lvl <= self.height:
                raise TreeModelError(f"leveling: node {u} at level {lvl} outside 1..{self.height}")
            if not children:
                raise TreeModelError(f"node {u} has no children")
            for ch in children:
                if ch in self.leaves:
                    ch_level = 0
                elif ch in self.nodes:
                    ch_level = self.nodes[ch][0]
                else:
                    raise TreeModelError(f"node {u} has unknown child {ch}")
                if ch_level != lvl - 1:
                    raise TreeModelError(
                        f"leveling: node {u} at level {lvl} has child {ch} at level {ch_level}"
                    )
                if ch in parent:
                    raise TreeModelError(f"{ch} has two parents ({parent[ch]} and {u})")
                parent[ch] = u
        roots = [u for u in list(self.leaves) + list(self.nodes) if u not in parent]
        if not roots:
            raise TreeModelError("empty tree-model")
        if len(roots) > 1:
            raise TreeModelError(f"multiple roots: {sorted(roots)}")
        top = self.nodes[roots[0]][0] if roots[0] in self.nodes else 0
        if top != self.height:
            raise TreeModelError(f"leveling: root at level {top} but height is {self.height}")

    @property
    def k(self) -> int:
        return len(self.palette)

    @cached_property
    def root(self) -> int:
        children = {ch for _, chs in self.nodes.values() for ch in chs}
        (root,) = [u for u in list(self.nodes) + list(self.leaves) if u not in children]
        return root

    @property
    def n(self) -> int:
        return len(self.leaves)

    def level(self, u: int) -> int:
        return 0 if u in self.leaves else self.nodes[u][0]

    def children(self, u: int) -> tuple[int, ...]:
        return () if u in self.leaves else self.nodes[u][1]

    def pairs_at(self, u: int) -> frozenset[tuple[int, int]]:
        return self.pairs.get(u, frozenset())

    @cached_property
    def subtree_leaves(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, tuple[int, ...]] = {v: (v,) for v in self.leaves}
        for u in sorted(self.nodes, key=lambda x: self.nodes[x][0]):
            out[u] = tuple(sorted(v for ch in self.nodes[u][1] for v in out[ch]))
        return out

    def bottom_up(self) -> list[int]:
        """Internal nodes ordered by level, then id."""
        return sorted(self.nodes, key=lambda u: (self.nodes[u][0], u))

    def coloring(self) -> Coloring:
        ids = sorted(self.leaves)
        if ids != list(range(len(ids))):
            raise TreeModelError("leaf ids must be 0..n-1 to form an arena")
        return Coloring(self.palette, tuple(self.leaves[v] for v in ids))


def edges_at_node(tm: TreeModel, u: int, pair: tuple[int, int]) -> set[tuple[int, int]]:
    c, c2 = pair
    below = tm.subtree_leaves[u]
    src = [v for v in below if tm.leaves[v] == c]
    dst = [v for v in below if tm.leaves[v] == c2]
    return {(a, b) for a in src for b in dst}


def induce_arena(tm: TreeModel) -> tuple[Arena, Coloring]:
    coloring = tm.coloring()
    edges: set[tuple[int, int]] = set()
    for u in tm.bottom_up():
        for pair in tm.pairs_at(u):
            edges |= edges_at_node(tm, u, pair)
    owner = [tm.palette[c] for c in coloring.assignment]
    return Arena.build(owner, edges), coloring


def pad_to_height(tm: TreeModel, h: int) -> TreeModel:
    """Stack unary nodes with empty pair sets above the root until height ``h``."""
    if h < tm.height:
        raise TreeModelError(f"cannot pad height {tm.height} down to {h}")
    nodes = dict(tm.nodes)
    nxt = max(list(tm.leaves) + list(tm.nodes)) + 1
    top = tm.root
    for lvl in range(tm.height + 1, h + 1):
        nodes[nxt] = (lvl, (top,))
        top, nxt = nxt, nxt + 1
    return TreeModel(h, tm.palette, tm.leaves, nodes, tm.pairs)


def pad_palette(tm: TreeModel, k: int) -> TreeModel:
    """Append unused O-colours until the palette has ``k`` colours."""
    if k < tm.k:
        raise TreeModelError(f"palette already has {tm.k} > {k} colours")
    palette = tm.palette + (Player.O,) * (k - tm.k)
    return TreeModel(tm.height, palette, tm.leaves, tm.nodes, tm.pairs)


# --- text format ------------------------------------------------------------


def parse_tm(text: str) -> TreeModel:
    header = None
    palette: dict[int, Player] = {}
    leaves: dict[int, int] = {}
    nodes: dict[int, tuple[int, tuple[int, ...]]] = {}
    pairs: dict[int, set[tuple[int, int]]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not line.endswith(";"):
            raise FormatError("line must end with ';'", lineno)
        parts = line[:-1].split()
        kind, args = parts[0], parts[1:]
        try:
            if kind == "treemodel":
                if header is not None:
                    raise FormatError("duplicate treemodel header", lineno)
                if len(args) != 2:
                    raise FormatError("expected 'treemodel <numColors> <height>;'", lineno)
                header = (int(args[0]), int(args[1]))
            elif header is None:
                raise FormatError("missing 'treemodel' header", lineno)
            elif kind == "color":
                cid, side = int(args[0]), args[1]
                if side not in ("E", "O") or len(args) != 2:
                    raise FormatError(f"bad color line {line!r}", lineno)
                if cid in palette:
                    raise FormatError(f"duplicate color {cid}", lineno)
                palette[cid] = Player[side]
            elif kind == "leaf":
                vid, cid = int(args[0]), int(args[1])
                if vid in leaves:
                    raise FormatError(f"duplicate leaf {vid}", lineno)
                if cid not in palette:
                    raise FormatError(f"unknown color {cid} on leaf {vid}", lineno)
                leaves[vid] = cid
            elif kind == "node":
                nid, lvl = int(args[0]), int(args[1])
                children = tuple(int(x) for x in args[2].split(",") if x) if len(args) > 2 else ()
                if nid in nodes:
                    raise FormatError(f"duplicate node {nid}", lineno)
                nodes[nid] = (lvl, children)
            elif kind == "pair":
                nid, c, c2 = (int(x) for x in args)
                for x in (c, c2):
                    if x not in palette:
                        raise FormatError(f"unknown color {x} in pair", lineno)
                pairs.setdefault(nid, set()).add((c, c2))
            else:
                raise FormatError(f"unknown directive {kind!r}", lineno)
        except (ValueError, IndexError) as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"malformed line {line!r}", lineno) from None
    if header is None:
        raise FormatError("missing 'treemodel' header")
    k, height = header
    if sorted(palette) != list(range(k)):
        raise FormatError(f"expected colors 0..{k - 1}, got {sorted(palette)}")
    return TreeModel(
        height,
        tuple(palette[c] for c in range(k)),
        leaves,
        nodes,
        {u: frozenset(p) for u, p in pairs.items()},
    )


def serialize_tm(tm: TreeModel, color_names: Iterable[str] | None = None) -> str:
    lines = [f"treemodel {tm.k} {tm.height};"]
    lines += [f"color {c} {p.name};" for c, p in enumerate(tm.palette)]
    lines += [f"leaf {v} {c};" for v, c in tm.leaves.items()]
    for u in tm.bottom_up():
        lvl, children = tm.nodes[u]
        lines.append(f"node {u} {lvl} {','.join(map(str, children))};")
    for u in tm.bottom_up():
        for c, c2 in sorted(tm.pairs_at(u)):
            lines.append(f"pair {u} {c} {c2};")
    return "\n".join(lines)
