"""Graphviz DOT renderings for inspection."""

from __future__ import annotations

from typing import Sequence

from .core import ParityGame, Player
from .treedepth import EliminationForest
from .treemodel import TreeModel


def _graph(kind: str, name: str, body: list[str]) -> str:
    return "\n".join([f"{kind} {name} {{", *("  " + line for line in body), "}"]) + "\n"


def game_to_dot(game: ParityGame, color_names: Sequence[str] | None = None, colors=None) -> str:
    body = ["node [fontname=monospace];"]
    for v in game.arena.vertices:
        shape = "diamond" if game.owner[v] is Player.E else "box"
        label = f"{v}:{game.rank[v]}"
        if colors is not None:
            c = colors[v]
            label += f" {color_names[c] if color_names else c}"
        body.append(f'{v} [shape={shape}, label="{label}"];')
    body += [f"{v} -> {w};" for v, w in sorted(game.edges)]
    return _graph("digraph", "game", body)


def forest_to_dot(forest: EliminationForest) -> str:
    body = [f"{v};" for v in range(forest.n)]
    body += [f"{p} -> {v};" for v, p in enumerate(forest.parent) if p is not None]
    return _graph("digraph", "forest", body)


def tree_model_to_dot(tm: TreeModel) -> str:
    body = ["rankdir=BT;"]
    for v, c in tm.leaves.items():
        body.append(f'{v} [shape=circle, label="{v}\\nc{c}/{tm.palette[c].name}"];')
    for u in tm.bottom_up():
        lvl = tm.level(u)
        pairs = " ".join(f"({s},{t})" for s, t in sorted(tm.pairs_at(u)))
        body.append(f'{u} [shape=box, label="{u} L{lvl}\\n{pairs}"];')
        body += [f"{ch} -> {u};" for ch in tm.children(u)]
    return _graph("digraph", "treemodel", body)
