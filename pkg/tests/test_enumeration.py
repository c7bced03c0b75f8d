import pytest

from inverse_power.core import CompleteGame, InvalidGameError, WeightedGame
from inverse_power.enumeration import (
    LimitExceeded,
    cached_games,
    count_games,
    enumerate_complete_games,
    enumerate_weighted_games,
    extendable_to_weighted,
    is_weighted,
    iter_games,
    partial_losing_set,
    simple_game_tables,
    walk,
)
from inverse_power.reference import GAME_COUNTS

from . import oracles
from .conftest import games_of


@pytest.mark.parametrize("n", range(1, 5))
def test_simple_games_match_boolean_scan(n):
    assert [int(t) for t in simple_game_tables(n)] == list(oracles.simple_game_tables(n))


@pytest.mark.parametrize("n", range(1, 5))
def test_complete_games_match_definition(n):
    got = [g.table for g in games_of("csg", n)]
    assert len(got) == len(set(got))
    assert set(got) == set(oracles.complete_ordered_tables(n))


@pytest.mark.parametrize("n,wmax", [(1, 1), (2, 2), (3, 3), (4, 4), (5, 6)])
def test_weighted_games_match_weight_scan(n, wmax):
    got = [g.table for g in games_of("wvg", n)]
    assert len(got) == len(set(got))
    assert set(got) == oracles.weighted_tables(n, wmax)


@pytest.mark.parametrize("cls,upto", [("sg", 5), ("csg", 6), ("wvg", 6)])
def test_counts_small(cls, upto):
    for n in range(1, upto + 1):
        assert count_games(cls, n) == GAME_COUNTS[cls][n - 1]


def test_complete_games_are_orderly_and_valid():
    seen = set()
    for g in games_of("csg", 5):
        CompleteGame(g.n, g.shift_min_winning)  # full antichain validation
        assert g.shift_min_winning not in seen
        seen.add(g.shift_min_winning)
        s = g.to_simple()
        assert s.is_complete() and list(s.desirability_order()) == list(range(1, 6))


def test_weighted_representations_induce_games():
    for g in games_of("wvg", 5):
        assert isinstance(g, WeightedGame)
        assert g.to_simple().to_complete().to_simple().table == g.table


def test_is_weighted_detects_non_weighted():
    n = 6
    non = [g for g in games_of("csg", n) if is_weighted(g) is None]
    assert len(non) == GAME_COUNTS["csg"][n - 1] - GAME_COUNTS["wvg"][n - 1]
    weighted = {g.table for g in games_of("wvg", n)}
    assert not any(g.table in weighted for g in non)


@pytest.mark.parametrize("n", [3, 4])
def test_partial_losing_set_matches_completions(n):
    nodes = []
    walk(n, lambda node: nodes.append(node.W) or True)
    assert len(nodes) == GAME_COUNTS["csg"][n - 1]
    for W in nodes:
        expect = oracles.shift_maximal(n, oracles.forced_losing_oracle(n, W))
        assert list(partial_losing_set(n, W)) == expect


def test_partial_losing_set_rejects_bad_input():
    with pytest.raises(InvalidGameError):
        partial_losing_set(3, ())
    with pytest.raises(InvalidGameError):
        partial_losing_set(3, (0b110, 0b101))


def test_pruning_never_drops_a_weighted_completion():
    n = 5
    weighted = {g.table for g in games_of("wvg", n)}
    cut = []

    def enter(node):
        if not extendable_to_weighted(node):
            cut.append(node)
            return False
        return True

    walk(n, enter)
    for node in cut:
        below = [g for g in games_of("csg", n) if g.shift_min_winning[: len(node.W)] == node.W]
        assert not any(g.table in weighted for g in below)
    assert enumerate_weighted_games(n, prune=False) == enumerate_weighted_games(n)


def test_threads_give_same_counts():
    assert enumerate_complete_games(6, threads=2) == GAME_COUNTS["csg"][5]
    assert enumerate_weighted_games(5, threads=2) == GAME_COUNTS["wvg"][4]


def test_limits():
    with pytest.raises(LimitExceeded):
        simple_game_tables(7)
    with pytest.raises(LimitExceeded):
        enumerate_complete_games(9)
    with pytest.raises(ValueError):
        count_games("xyz", 3)


def test_cache_round_trip(tmp_path):
    first = cached_games("wvg", 5, tmp_path)
    path = tmp_path / "wvg_5.txt"
    data = path.read_bytes()
    second = cached_games("wvg", 5, tmp_path)
    assert path.read_bytes() == data
    assert [g.table for g in first] == [g.table for g in second] == [g.table for g in iter_games("wvg", 5)]
    # a truncated cache is rebuilt
    path.write_text("\n".join(data.decode().splitlines()[:10]) + "\n#count:117\n")
    assert len(cached_games("wvg", 5, tmp_path)) == 117
    assert path.read_bytes() == data

