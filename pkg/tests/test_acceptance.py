"""Acceptance criteria, one test each, with wall-clock limits.

Every test records a ``criterion N: PASS|FAIL`` line; ``conftest.py`` prints
them in the terminal summary. Run this file directly to print them without
pytest's capture.
"""

import os
import random
import subprocess
import sys
from contextlib import contextmanager
from itertools import product
from pathlib import Path
from time import perf_counter

from graph_oracles import longest_simple_path, min_forest_height
from samples import (
    A,
    B,
    C,
    D,
    MODEL4_EDGES,
    MODEL4_FOREST,
    MODEL4_TEXT,
    SG_PATTERN,
    SG_WHITE,
    STOP_GAME,
    STOP_GAME_COLORING,
    STOP_GAME_MODEL,
    STOP_GAME_TEXT,
    model4,
)
from shallowpg.circuit import (
    BitLayout,
    decode_input,
    decode_output,
    emit_scw_circuit,
    encode_input,
    eval_batch,
    prepare_model,
    validation_bit,
)
from shallowpg.core import Arena, ParityGame, Player, serialize_pg
from shallowpg.enforcement import Enforcement, all_enforcements, enf_leq, enf_merge, precede
from shallowpg.oracle import (
    STOP,
    PositionalStopStrategy,
    enforcement_of,
    reference_valid_floor,
    solve_zielonka,
)
from shallowpg.random_instances import (
    game_from_model,
    game_over_forest,
    random_forest,
    random_game,
    random_tree_model,
)
from shallowpg.reduction import solve_treedepth
from shallowpg.scw import run_scw, solve_scw
from shallowpg.treedepth import EliminationForest, serialize_forest, tree_depth, validate_forest
from shallowpg.treemodel import TreeModel, induce_arena, serialize_tm

E, O = Player.E, Player.O
RESULTS: list[str] = []


@contextmanager
def criterion(num, title, limit):
    start = perf_counter()
    try:
        yield
    except BaseException as exc:
        line = f"criterion {num}: FAIL ({perf_counter() - start:.2f}s) {title}: {exc!r}"[:300]
        RESULTS.append(line)
        print(line)
        raise
    elapsed = perf_counter() - start
    ok = limit is None or elapsed < limit
    bound = "" if limit is None else f" < {limit:g}s"
    line = f"criterion {num}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s{bound}) {title}"
    RESULTS.append(line)
    print(line)
    assert ok, f"criterion {num} exceeded its time limit: {elapsed:.1f}s"


def test_c01_golden_enforcements():
    with criterion(1, "stop-game enforcements of {a->b, d->STOP}", 1):
        rho = PositionalStopStrategy.of({A: B, D: STOP})
        expected = {
            A: {SG_WHITE: 2, SG_PATTERN: 2},
            B: {SG_WHITE: 2, SG_PATTERN: 2},
            C: {SG_WHITE: 0, SG_PATTERN: 1},
            D: {SG_PATTERN: 1},
        }
        for v, want in expected.items():
            got = enforcement_of(STOP_GAME, STOP_GAME_COLORING, rho, v)
            assert got == Enforcement.from_map(want, 3), (v, got)


def test_c02_golden_induction():
    with criterion(2, "four-leaf model induces its arena; its forest validates", 1):
        for player in (E, O):
            arena, _ = induce_arena(model4(player))
            assert arena.edges == set(MODEL4_EDGES)
            assert validate_forest(arena, MODEL4_FOREST)


def test_c03_scw_agreement():
    with criterion(3, "solve_scw = zielonka on 1000 random tree-models", 120):
        rng = random.Random(3)
        for i in range(1000):
            tm = random_tree_model(rng, rng.randint(1, 10), rng.randint(1, 3), rng.randint(1, 3))
            g = game_from_model(rng, tm, rng.randint(1, 4))
            assert solve_scw(g, tm) == solve_zielonka(g), f"instance {i}"


def test_c04_treedepth_agreement():
    with criterion(4, "solve_treedepth = zielonka on 500 random games", 120):
        rng = random.Random(4)
        for i in range(500):
            parent = random_forest(rng, rng.randint(1, 7), rng.randint(0, 3))
            g = game_over_forest(rng, parent, rng.randint(1, 4), density=rng.uniform(0.2, 0.7))
            forest = EliminationForest(parent)
            assert validate_forest(g.arena, forest) and forest.height <= 3
            assert solve_treedepth(g, forest) == solve_zielonka(g), f"instance {i}"


def _completeness_models():
    # Four-leaf models with mixed palettes plus the hand-built stop-game model.
    base = model4(E)
    out = [model4(E), model4(O), STOP_GAME_MODEL]
    for palette in ((E, O, E), (O, E, O), (E, E, O), (O, O, E)):
        out.append(TreeModel(base.height, palette, base.leaves, base.nodes, base.pairs))
    out.append(
        TreeModel(
            2,
            (E, O),
            {0: 0, 1: 1, 2: 0},
            {3: (1, (0, 1)), 4: (1, (2,)), 5: (2, (3, 4))},
            {3: frozenset({(0, 1), (1, 0)}), 4: frozenset({(0, 0)}), 5: frozenset({(1, 0), (0, 0)})},
        )
    )
    return out


def test_c05_completeness():
    with criterion(5, "safe positional enforcements lie in every intermediate DP set", 300):
        d = 3
        checked = 0
        for tm in _completeness_models():
            arena, coloring = induce_arena(tm)
            for rank in product(range(d), repeat=arena.n):
                owner = arena.owner

                def hook(node, pair, state):
                    nonlocal checked
                    sub = ParityGame(Arena.build(owner, state.edges), rank)
                    for v in state.present:
                        floor = reference_valid_floor(sub, coloring, v, d)
                        assert floor.issubset(state.sets[v]), (tm, rank, node, pair, v)
                        checked += 1

                root = run_scw(ParityGame(arena, rank), tm, d=d, on_step=hook)
                assert root.edges == arena.edges
        assert checked > 10_000


def test_c06_algebra_laws():
    with criterion(6, "order laws and merge monotonicity, exhaustive", 60):
        key = {p: (p if p % 2 == 0 else -p) for p in range(2**10)}
        assert len(set(key.values())) == len(key)
        for p in range(2**10):
            for q in range(2**10):
                lt = precede(p, q)
                assert lt == (key[p] < key[q])
                assert (lt + precede(q, p) + (p == q)) == 1
        for d, k in product((1, 2, 3), (1, 2)):
            space = list(all_enforcements(d, k))
            leq = {(p, q): enf_leq(p, q) for p in space for q in space}
            for p in space:
                assert leq[p, p]
            for p, q in product(space, space):
                assert not (leq[p, q] and leq[q, p]) or p == q
            for p, q, r in product(space, space, space):
                assert not (leq[p, q] and leq[q, r]) or leq[p, r]
            below = {p: [q for q in space if leq[q, p]] for p in space}
            for side, c in product((E, O), range(k)):
                for p, q in product(space, space):
                    top = enf_merge(side, p, c, q)
                    for p2 in below[p]:
                        for q2 in below[q]:
                            assert leq[enf_merge(side, p2, c, q2), top]


def test_c07_circuit_witness():
    with criterion(7, "circuit winners = solve_scw; depth equal for n = 4 and 8", 300):
        for n in (4, 5):
            c = emit_scw_circuit(n, 2, 2)
            lay = BitLayout(n, 2, 2)
            rng = random.Random(70 + n)
            games, rows = [], []
            for _ in range(60):
                tm = random_tree_model(rng, n, rng.randint(1, 2), rng.randint(1, 2), pair_prob=0.35)
                g = game_from_model(rng, tm, 2)
                games.append((g, prepare_model(tm, 2)))
                rows.append(encode_input(g, games[-1][1], lay))
            for (g, tm), bits, out in zip(games, rows, eval_batch(c, rows)):
                assert validation_bit(out, c) == 1
                rank, decoded = decode_input(bits, lay)
                assert rank == g.rank and induce_arena(decoded)[0] == g.arena
                assert decode_output(out, c) == solve_scw(g, tm)
        assert emit_scw_circuit(4, 2, 2).depth() == emit_scw_circuit(8, 2, 2).depth()


def test_c08_path_bound():
    with criterion(8, "no simple path longer than 2^(k+1)-2 under a height-k forest", 60):
        rng = random.Random(8)
        for i in range(200):
            k = rng.randint(0, 2)
            parent = random_forest(rng, rng.randint(1, 10), k)
            g = game_over_forest(rng, parent, 1, density=rng.uniform(0.3, 1.0))
            forest = EliminationForest(parent)
            assert validate_forest(g.arena, forest) and forest.height <= k
            assert longest_simple_path(g.arena) <= 2 ** (k + 1) - 2, f"instance {i}"


def test_c09_treedepth_values():
    with criterion(9, "tree-depth values against forest enumeration", 60):
        assert tree_depth(Arena.build([E], [])) == 0
        for n in range(1, 7):
            full = Arena.build([E] * n, [(v, w) for v in range(n) for w in range(n) if v != w])
            assert tree_depth(full) == n - 1
        # every undirected graph on up to 4 vertices, random ones on 5 and 6
        for n in range(1, 5):
            pairs = [(v, w) for v in range(n) for w in range(v + 1, n)]
            for mask in range(2 ** len(pairs)):
                a = Arena.build([E] * n, [p for i, p in enumerate(pairs) if mask >> i & 1])
                assert tree_depth(a) == min_forest_height(a)
        rng = random.Random(9)
        for _ in range(150):
            g = random_game(rng, rng.choice((5, 6)), 1, density=rng.uniform(0.05, 0.5))
            assert tree_depth(g.arena) == min_forest_height(g.arena)


def _cli(args, cwd, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    proc = subprocess.run(
        [sys.executable, "-m", "shallowpg", *args], cwd=cwd, env=env, capture_output=True
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_c10_cli_determinism(tmp_path):
    with criterion(10, "every CLI command is byte-identical across runs", None):
        rng = random.Random(10)
        parent = random_forest(rng, 6, 2)
        g = game_over_forest(rng, parent, 4)
        files = {
            "g.pg": serialize_pg(g),
            "g.ef": serialize_forest(EliminationForest(parent)),
            "stop.pg": STOP_GAME_TEXT,
            "stop.tm": serialize_tm(STOP_GAME_MODEL),
            "m4.tm": MODEL4_TEXT.format(p="O"),
            "tiny.tm": "treemodel 2 1;\ncolor 0 E;\ncolor 1 O;\nleaf 0 0;\nleaf 1 1;\nnode 2 1 0,1;\npair 2 0 1;\npair 2 1 0;",
        }
        for name, text in files.items():
            (tmp_path / name).write_text(text)
        (tmp_path / "tiny.pg").write_text("parity 2;\n0 1 0 1;\n1 0 1 0;")
        commands = [
            ["solve", "g.pg", "--method", "zielonka"],
            ["solve", "g.pg", "--method", "treedepth", "--forest", "g.ef", "--dot", "OUT.dot"],
            ["solve", "g.pg", "--method", "auto"],
            ["solve", "stop.pg", "--method", "scw", "--treemodel", "stop.tm"],
            ["treedepth", "g.pg"],
            ["forest", "g.pg", "--dot", "OUT.dot"],
            ["reduce", "stop.pg"],
            ["reduce", "g.pg", "--forest", "g.ef", "--out", "OUT"],
            ["induce", "m4.tm", "--ranks", "0,1,2,3", "--dot", "OUT.dot"],
            ["emit-circuit", "2", "2", "2", "--out", "OUT.circ"],
            ["validate", "stop.pg", "--treemodel", "stop.tm"],
            ["validate", "g.ef", "--game", "g.pg"],
            ["selftest", "--seed", "5", "--count", "15"],
        ]
        for cmd in commands:
            runs = []
            for rep, hash_seed in enumerate((0, 12345)):
                argv = [a.replace("OUT", f"out{rep}") for a in cmd]
                code, out, err = _cli(argv, tmp_path, hash_seed)
                assert code == 0, (cmd, err)
                side = sorted(p for p in tmp_path.iterdir() if p.name.startswith(f"out{rep}"))
                runs.append((out, [(p.name[4:], p.read_bytes()) for p in side]))
                for p in side:
                    p.unlink()
            assert runs[0] == runs[1], cmd
        circ = tmp_path / "c.circ"
        _cli(["emit-circuit", "2", "2", "2", "--out", "c.circ"], tmp_path, 0)
        evals = {
            _cli(["eval-circuit", "c.circ", "--game", "tiny.pg", "--treemodel", "tiny.tm"], tmp_path, s)
            for s in (1, 2)
        }
        assert len(evals) == 1 and next(iter(evals))[0] == 0
        assert circ.exists()


if __name__ == "__main__":
    import tempfile

    tests = [obj for name, obj in sorted(globals().items()) if name.startswith("test_c")]
    failed = 0
    for t in tests:
        try:
            if t.__code__.co_argcount:
                with tempfile.TemporaryDirectory() as tmp:
                    t(Path(tmp))
            else:
                t()
        except Exception:
            failed += 1
    sys.exit(1 if failed else 0)
