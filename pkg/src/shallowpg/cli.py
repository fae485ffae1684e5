"""Solve and transform parity games with tree-models and elimination forests.

Every command writes line-oriented, vertex-sorted output so runs can be diffed.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import circuit as circ
from .core import FormatError, ParityGame, parse_pg, serialize_pg
from .dot import forest_to_dot, game_to_dot, tree_model_to_dot
from .oracle import solve_zielonka
from .random_instances import (
    game_from_model,
    game_over_forest,
    random_forest,
    random_tree_model,
)
from .reduction import reduce, serialize_copy_map, solve_treedepth
from .scw import ModelMismatch, check_model, solve_scw
from .treedepth import (
    TD_LIMIT,
    EliminationForest,
    find_forest,
    parse_forest,
    serialize_forest,
    tree_depth,
    validate_forest,
)
from .treemodel import TreeModel, TreeModelError, induce_arena, parse_tm, serialize_tm


class CliError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _load_game(path: str) -> ParityGame:
    return parse_pg(_read(path))


def _load_forest(path: str) -> EliminationForest:
    return parse_forest(_read(path))


def _load_tm(path: str) -> TreeModel:
    return parse_tm(_read(path))


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dot(args, text: str) -> None:
    if args.dot:
        Path(args.dot).write_text(text)


def _forest_for(game: ParityGame, args) -> EliminationForest | None:
    if args.forest:
        return _load_forest(args.forest)
    if game.n > TD_LIMIT:
        return None
    return find_forest(game.arena, args.max_k)


# --- commands ----------------------------------------------------------------


def cmd_solve(args) -> None:
    game = _load_game(args.game)
    _dot(args, game_to_dot(game))
    method = args.method
    if method == "zielonka":
        win = solve_zielonka(game)
    elif method == "scw":
        if not args.treemodel:
            raise CliError("--method scw needs --treemodel")
        win = solve_scw(game, _load_tm(args.treemodel))
    elif method == "treedepth":
        if args.forest:
            forest = _load_forest(args.forest)
        else:
            forest = find_forest(game.arena, tree_depth(game.arena))
        win = solve_treedepth(game, forest)
    else:
        forest = _forest_for(game, args)
        win = solve_zielonka(game) if forest is None else solve_treedepth(game, forest)
    _emit(args, "\n".join(win.lines()))


def cmd_treedepth(args) -> None:
    game = _load_game(args.game)
    _dot(args, game_to_dot(game))
    _emit(args, str(tree_depth(game.arena)))


def cmd_forest(args) -> None:
    game = _load_game(args.game)
    k = tree_depth(game.arena) if args.max_k is None else args.max_k
    forest = find_forest(game.arena, k)
    if forest is None:
        raise CliError(f"tree-depth exceeds {k}; no forest of that height")
    _dot(args, forest_to_dot(forest))
    _emit(args, serialize_forest(forest))


def cmd_reduce(args) -> None:
    game = _load_game(args.game)
    if args.forest:
        forest = _load_forest(args.forest)
    else:
        forest = find_forest(game.arena, tree_depth(game.arena))
    result = reduce(game, forest)
    _dot(args, tree_model_to_dot(result.tree_model))
    parts = {
        "pg": serialize_pg(result.game),
        "tm": serialize_tm(result.tree_model),
        "map": serialize_copy_map(result),
    }
    if args.out:
        for ext, text in parts.items():
            Path(f"{args.out}.{ext}").write_text(text + "\n")
        return
    blocks = [f"# {ext}\n{text}" for ext, text in parts.items()]
    sys.stdout.write("\n".join(blocks) + "\n")


def cmd_induce(args) -> None:
    tm = _load_tm(args.treemodel_file)
    arena, _ = induce_arena(tm)
    if args.ranks:
        rank = [int(x) for x in args.ranks.split(",")]
        if len(rank) != arena.n:
            raise CliError(f"--ranks has {len(rank)} values for {arena.n} vertices")
    else:
        rank = [0] * arena.n
    game = ParityGame(arena, tuple(rank))
    _dot(args, tree_model_to_dot(tm))
    _emit(args, serialize_pg(game))


def cmd_emit_circuit(args) -> None:
    c = circ.emit_scw_circuit(args.n, args.d, args.k)
    _emit(args, circ.serialize_circuit(c))


def cmd_eval_circuit(args) -> None:
    c = circ.parse_circuit(_read(args.circuit))
    if args.bits:
        bits = circ.parse_bits(_read(args.bits))
    elif args.game and args.treemodel:
        if c.params is None:
            raise CliError("circuit file has no '# scw' header; pass --bits instead")
        n, d, k = c.params
        layout = circ.BitLayout(n, d, k)
        tm = circ.prepare_model(_load_tm(args.treemodel), k)
        bits = circ.encode_input(_load_game(args.game), tm, layout)
    else:
        raise CliError("eval-circuit needs --bits, or --game with --treemodel")
    out = circ.eval_circuit(c, bits)
    _emit(args, "\n".join(f"{label} {b}" for (_, label), b in zip(c.outputs, out)))


def _sniff(text: str) -> str:
    for raw in text.splitlines():
        line = raw.strip()
        if not line or (line.startswith("#") and not line.startswith("# scw")):
            continue
        if line.startswith("treemodel"):
            return "treemodel"
        if line.startswith(("gate", "# scw")):
            return "circuit"
        if line.startswith("parity"):
            return "game"
        return "forest" if len(line.rstrip(";").split()) == 2 else "game"
    return "game"


def cmd_validate(args) -> None:
    text = _read(args.file)
    kind = args.kind or _sniff(text)
    parsers: dict[str, Callable[[str], object]] = {
        "game": parse_pg,
        "treemodel": parse_tm,
        "forest": parse_forest,
        "circuit": circ.parse_circuit,
    }
    obj = parsers[kind](text)
    lines = [f"ok {kind}"]
    if kind == "forest" and args.game:
        check = validate_forest(_load_game(args.game).arena, obj)
        if not check:
            raise CliError("; ".join(check.problems))
        lines.append("ok elimination forest for game")
    if kind == "game" and args.treemodel:
        check_model(obj, _load_tm(args.treemodel))
        lines.append("ok tree-model induces game")
    if kind == "game" and args.dot:
        _dot(args, game_to_dot(obj))
    _emit(args, "\n".join(lines))


def cmd_selftest(args) -> None:
    rng = random.Random(args.seed)
    lines = []
    agree = 0
    for _ in range(args.count):
        tm = random_tree_model(rng, rng.randint(1, 8), rng.randint(1, 3), rng.randint(1, 3))
        g = game_from_model(rng, tm, rng.randint(1, 4))
        agree += solve_scw(g, tm) == solve_zielonka(g)
    lines.append(f"scw {agree}/{args.count}")
    agree = 0
    for _ in range(args.count):
        n = rng.randint(1, 7)
        parent = random_forest(rng, n, rng.randint(0, 3))
        g = game_over_forest(rng, parent, rng.randint(1, 4))
        agree += solve_treedepth(g, EliminationForest(parent)) == solve_zielonka(g)
    lines.append(f"treedepth {agree}/{args.count}")
    _emit(args, "\n".join(lines))
    if any(not line.endswith(f"{args.count}/{args.count}") for line in lines):
        raise CliError("self-test disagreement")


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shallowpg", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, game=True):
        if game:
            sp.add_argument("game", help="PGSolver game file ('-' for stdin)")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--dot", help="also write a DOT rendering to this file")
        return sp

    sp = common(sub.add_parser("solve", help="print the winner of every vertex"))
    sp.add_argument("--method", choices=["zielonka", "scw", "treedepth", "auto"], default="auto")
    sp.add_argument("--forest")
    sp.add_argument("--treemodel")
    sp.add_argument("--max-k", type=int, default=3)
    sp.set_defaults(func=cmd_solve)

    sp = common(sub.add_parser("treedepth", help="print the tree-depth (height in edges)"))
    sp.set_defaults(func=cmd_treedepth)

    sp = common(sub.add_parser("forest", help="emit an elimination forest of minimum height"))
    sp.add_argument("--max-k", type=int, default=None)
    sp.set_defaults(func=cmd_forest)

    sp = common(sub.add_parser("reduce", help="emit reduced game, tree-model and copy map"))
    sp.add_argument("--forest")
    sp.set_defaults(func=cmd_reduce)

    sp = common(sub.add_parser("induce", help="tree-model to PGSolver file"), game=False)
    sp.add_argument("treemodel_file")
    sp.add_argument("--ranks", help="comma-separated ranks (default all 0)")
    sp.set_defaults(func=cmd_induce)

    sp = common(sub.add_parser("emit-circuit", help="emit the circuit for (n, d, k)"), game=False)
    sp.add_argument("n", type=int)
    sp.add_argument("d", type=int)
    sp.add_argument("k", type=int)
    sp.set_defaults(func=cmd_emit_circuit)

    sp = common(sub.add_parser("eval-circuit", help="evaluate a circuit file"), game=False)
    sp.add_argument("circuit")
    sp.add_argument("--bits", help="file with a 0/1 input string")
    sp.add_argument("--game")
    sp.add_argument("--treemodel")
    sp.set_defaults(func=cmd_eval_circuit)

    sp = common(sub.add_parser("validate", help="check a game, tree-model, forest or circuit file"), game=False)
    sp.add_argument("file")
    sp.add_argument("--kind", choices=["game", "treemodel", "forest", "circuit"])
    sp.add_argument("--game", help="with a forest file: check it against this game")
    sp.add_argument("--treemodel", help="with a game file: check the model induces it")
    sp.set_defaults(func=cmd_validate)

    sp = common(sub.add_parser("selftest", help="randomised cross-checks against the oracle"), game=False)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=100)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (CliError, FormatError, TreeModelError, ModelMismatch, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
