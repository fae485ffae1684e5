import random

import pytest

from graph_oracles import longest_simple_path, min_forest_height
from samples import A, B, C, D, MODEL4_EDGES, MODEL4_FOREST
from shallowpg.core import Arena, FormatError, Player
from shallowpg.random_instances import game_over_forest, random_forest, random_game
from shallowpg.treedepth import (
    EliminationForest,
    find_forest,
    parse_forest,
    serialize_forest,
    tree_depth,
    validate_forest,
)

MODEL4_ARENA = Arena.build([Player.E] * 4, MODEL4_EDGES)


def arena(n, edges):
    return Arena.build([Player.O] * n, edges)


def path(n):
    return arena(n, [(i, i + 1) for i in range(n - 1)])


def complete(n):
    return arena(n, [(v, w) for v in range(n) for w in range(n) if v != w])


def test_model4_forest():
    check = validate_forest(MODEL4_ARENA, MODEL4_FOREST)
    assert check and check.problems == []
    assert MODEL4_FOREST.depth == (0, 1, 2, 1)
    assert MODEL4_FOREST.height == 2
    assert MODEL4_FOREST.childless == [C, D]
    assert MODEL4_FOREST.ancestors(C) == [A, B, C]


def test_alternative_forests():
    # c and d under a, b under c: still valid
    assert validate_forest(MODEL4_ARENA, EliminationForest((None, C, A, A)))
    bad = validate_forest(MODEL4_ARENA, EliminationForest((None, A, A, A)))
    assert not bad
    assert bad.problems == ["edge 2->1 joins vertices that are not ancestor-related"]


def test_cycle_and_size_diagnostics():
    check = validate_forest(arena(2, []), EliminationForest((1, 0)))
    assert not check and "cycle" in check.problems[0]
    assert not validate_forest(arena(3, []), EliminationForest((None, 0)))
    with pytest.raises(ValueError):
        EliminationForest((5,))


@pytest.mark.parametrize(
    "a, expected",
    [(arena(1, []), 0), (path(4), 2), (path(7), 2), (path(8), 3), (MODEL4_ARENA, 2), (arena(3, []), 0)],
)
def test_tree_depth_values(a, expected):
    assert tree_depth(a) == expected


@pytest.mark.parametrize("n", range(1, 7))
def test_complete_graphs(n):
    assert tree_depth(complete(n)) == n - 1


def test_self_loops_ignored():
    assert tree_depth(arena(1, [(0, 0)])) == 0


def test_size_guard():
    with pytest.raises(ValueError, match="limited"):
        tree_depth(arena(21, []))


def test_find_forest_examples():
    single = find_forest(arena(1, []), 0)
    assert single.parent == (None,)
    f = find_forest(MODEL4_ARENA, 2)
    assert validate_forest(MODEL4_ARENA, f) and f.height <= 2
    triangle = complete(3)
    assert find_forest(triangle, 1) is None
    assert find_forest(triangle, 2).height == 2


def test_find_forest_picks_lowest_id():
    # on a path 0-1-2 the middle vertex is the only admissible root for k = 1
    assert find_forest(path(3), 1).parent == (1, None, 1)
    # with a generous budget the lowest id wins
    assert find_forest(path(3), 2).parent == (None, 0, 1)


@pytest.mark.parametrize("seed", range(60))
def test_matches_forest_enumeration(seed):
    rng = random.Random(seed)
    g = random_game(rng, rng.randint(1, 6), 1, density=rng.uniform(0.05, 0.5))
    td = tree_depth(g.arena)
    assert td == min_forest_height(g.arena)
    f = find_forest(g.arena, td)
    assert validate_forest(g.arena, f) and f.height == td
    if td > 0:
        assert find_forest(g.arena, td - 1) is None


@pytest.mark.parametrize("seed", range(60))
def test_path_bound(seed):
    rng = random.Random(seed)
    k = rng.randint(0, 2)
    parent = random_forest(rng, rng.randint(1, 10), k)
    g = game_over_forest(rng, parent, 2, density=0.7)
    forest = EliminationForest(parent)
    assert validate_forest(g.arena, forest)
    assert longest_simple_path(g.arena) <= 2 ** (forest.height + 1) - 2


def test_text_round_trip():
    text = serialize_forest(MODEL4_FOREST)
    assert text == "0 -1;\n1 0;\n2 1;\n3 0;"
    assert parse_forest(text) == MODEL4_FOREST
    assert parse_forest("# c\n1 0;\n0 -1;\n") == EliminationForest((None, 0))


@pytest.mark.parametrize(
    "text, needle",
    [("0 -1", "';'"), ("0;", "expected"), ("0 x;", "non-integer"), ("0 -1;\n0 -1;", "duplicate"),
     ("1 -1;", "0..n-1"), ("0 4;", "not a vertex"), ("0 -2;", "negative")],
)
def test_parse_errors(text, needle):
    with pytest.raises(FormatError, match=needle):
        parse_forest(text)
