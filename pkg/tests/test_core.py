import pytest
from hypothesis import given
from hypothesis import strategies as st

from inverse_power.core import (
    Coalition,
    CompleteGame,
    DesirabilityRelation,
    DimensionError,
    InvalidGameError,
    NotCompleteError,
    ShiftRelation,
    SimpleGame,
    WeightedGame,
    evaluate,
    format_game,
    parse_game,
    read_games,
    remove_voter,
    right_shift_successors,
    shift_compare,
    shift_leq,
    shift_poset,
    write_games,
)

from . import oracles


def weighted_strategy(max_n=6, max_w=9):
    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_n))
        w = sorted(draw(st.lists(st.integers(0, max_w), min_size=n, max_size=n)), reverse=True)
        if sum(w) == 0:
            w[0] = 1
        q = draw(st.integers(1, sum(w)))
        return WeightedGame(q, tuple(w))

    return build()


simple_tables4 = st.sampled_from(oracles.simple_game_tables(4))


def test_coalition_encoding():
    c = Coalition.from_members(5, [1, 3])
    assert c.mask == 0b10100
    assert c.vector == (1, 0, 1, 0, 0)
    assert str(c) == "10100"
    assert Coalition.from_bitstring("10100") == c
    assert c.members == (1, 3) and c.size == 2
    with pytest.raises(ValueError):
        Coalition(3, 8)
    with pytest.raises(ValueError):
        Coalition.from_vector([1, 2])


@pytest.mark.parametrize("n", range(1, 6))
def test_shift_order_matches_closure(n):
    for u in range(1 << n):
        for v in range(1 << n):
            assert shift_leq(n, u, v) == oracles.shift_leq_oracle(n, u, v)


def test_shift_poset_bitsets():
    n = 4
    sp = shift_poset(n)
    for v in range(1 << n):
        up = {u for u in range(1 << n) if sp.up[v] >> u & 1}
        assert up == {u for u in range(1 << n) if shift_leq(n, v, u)}
        down = {u for u in range(1 << n) if sp.strict_down[v] >> u & 1}
        assert down == {u for u in range(1 << n) if u != v and shift_leq(n, u, v)}


def test_shift_compare_and_successors():
    a, b = Coalition.from_bitstring("1100"), Coalition.from_bitstring("1010")
    assert shift_compare(b, a) is ShiftRelation.LESS
    assert shift_compare(a, b) is ShiftRelation.GREATER
    assert shift_compare(a, a) is ShiftRelation.EQUAL
    assert shift_compare(Coalition.from_bitstring("1000"), Coalition.from_bitstring("0110")) is ShiftRelation.INCOMPARABLE
    with pytest.raises(DimensionError):
        shift_compare(Coalition(3, 1), Coalition(4, 1))
    succ = {str(c) for c in right_shift_successors(Coalition.from_bitstring("1101"))}
    assert succ == {"1011", "1100"}
    with pytest.raises(ValueError):
        right_shift_successors(Coalition(3, 0))


@pytest.mark.parametrize("n", range(2, 6))
def test_successors_are_lower_covers(n):
    for v in range(1, 1 << n):
        covers = {
            u
            for u in range(1, 1 << n)
            if u != v
            and shift_leq(n, u, v)
            and not any(w not in (u, v) and shift_leq(n, u, w) and shift_leq(n, w, v) for w in range(1 << n))
        }
        assert {c.mask for c in right_shift_successors(Coalition(n, v))} == covers


def test_simple_game_validation():
    with pytest.raises(InvalidGameError):
        SimpleGame(2, 0b1001)  # empty coalition wins
    with pytest.raises(InvalidGameError):
        SimpleGame(2, 0b0110)  # grand coalition loses
    with pytest.raises(InvalidGameError):
        SimpleGame(3, (1 << 7) | (1 << 0b001) | (1 << 0b010))  # {3},{2} win but {2,3} loses


def test_weighted_game_validation():
    with pytest.raises(InvalidGameError):
        WeightedGame(0, (1, 1))
    with pytest.raises(InvalidGameError):
        WeightedGame(3, (1, 1))
    with pytest.raises(InvalidGameError):
        WeightedGame(1, (1, 2))
    with pytest.raises(InvalidGameError):
        WeightedGame(1, (1, -1))


@given(weighted_strategy())
def test_weighted_table_matches_definition(g):
    for mask in range(1 << g.n):
        s = oracles.mask_to_set(g.n, mask)
        assert evaluate(g, mask) == int(sum(g.w[i - 1] for i in s) >= g.q)


@given(simple_tables4)
def test_minimal_winning_and_maximal_losing(table):
    n = 4
    g = SimpleGame(n, table)
    wins = oracles.win_fn(n, table)
    mw = {
        m for m in range(1 << n)
        if wins(oracles.mask_to_set(n, m))
        and all(not wins(oracles.mask_to_set(n, m) - {i}) for i in oracles.mask_to_set(n, m))
    }
    ml = {
        m for m in range(1 << n)
        if not wins(oracles.mask_to_set(n, m))
        and all(wins(oracles.mask_to_set(n, m) | {i}) for i in range(1, n + 1) if i not in oracles.mask_to_set(n, m))
    }
    assert {c.mask for c in g.minimal_winning()} == mw
    assert {c.mask for c in g.maximal_losing()} == ml
    used = set().union(*(oracles.mask_to_set(n, m) for m in mw))
    assert g.null_voters() == set(range(1, n + 1)) - used


@given(simple_tables4)
def test_dual_definition_and_involution(table):
    n = 4
    g = SimpleGame(n, table)
    d = g.dual()
    full = (1 << n) - 1
    for m in range(1 << n):
        assert d.wins(m) == (not g.wins(full ^ m))
    assert d.dual() == g


@given(simple_tables4, st.integers(1, 4), st.integers(1, 4))
def test_desirability_matches_definition(table, i, j):
    if i == j:
        return
    n = 4
    g = SimpleGame(n, table)
    wins = oracles.win_fn(n, table)
    a, b = oracles.desirable(n, wins, i, j), oracles.desirable(n, wins, j, i)
    expect = {
        (True, True): DesirabilityRelation.EQUIVALENT,
        (True, False): DesirabilityRelation.STRICTLY_MORE,
        (False, True): DesirabilityRelation.STRICTLY_LESS,
        (False, False): DesirabilityRelation.INCOMPARABLE,
    }[a, b]
    assert g.desirability(i, j) is expect


def test_desirability_argument_checks():
    g = WeightedGame(2, (1, 1, 1)).to_simple()
    with pytest.raises(ValueError):
        g.desirability(1, 1)
    with pytest.raises(ValueError):
        g.desirability(1, 4)


def test_incomplete_game_has_no_order():
    # minimal winning {1,2} and {3,4}: voters 1 and 3 are incomparable
    n = 4
    flags = 0
    for m in range(1 << n):
        s = oracles.mask_to_set(n, m)
        if {1, 2} <= s or {3, 4} <= s:
            flags |= 1 << m
    g = SimpleGame(n, flags)
    assert not g.is_complete()
    with pytest.raises(NotCompleteError):
        g.desirability_order()


def test_to_complete_requires_sorted_voters():
    g = WeightedGame(2, (1, 1, 0)).to_simple().relabel((3, 1, 2))
    assert g.is_complete()
    with pytest.raises(NotCompleteError) as err:
        g.to_complete()
    assert err.value.permutation == (2, 3, 1)
    fixed = g.relabel(err.value.permutation)
    assert fixed.to_complete().to_simple() == fixed


@given(weighted_strategy(max_n=5))
def test_complete_round_trip(g):
    s = g.to_simple()
    c = s.to_complete()
    assert c.to_simple() == s
    assert list(c.shift_min_winning) == oracles.shift_minimal(g.n, s.table)
    losing = {m for m in range(1 << g.n) if not s.wins(m)}
    assert list(c.shift_max_losing()) == oracles.shift_maximal(g.n, losing)


def test_complete_game_validation():
    with pytest.raises(InvalidGameError):
        CompleteGame(3, ())
    with pytest.raises(InvalidGameError):
        CompleteGame(3, (0b011, 0b100))  # not lex-descending
    with pytest.raises(InvalidGameError):
        CompleteGame(3, (0b110, 0b101))  # 101 ⪯ 110
    with pytest.raises(InvalidGameError):
        CompleteGame(3, (0b1000,))


def test_relabel_and_remove_voter():
    g = WeightedGame(3, (2, 1, 1)).to_simple()
    r = g.relabel((3, 2, 1))  # old voter 1 becomes voter 3
    assert r.wins(0b011) and not r.wins(0b110)
    h = remove_voter(WeightedGame(2, (1, 1, 0)).to_simple(), 3)
    assert h == WeightedGame(2, (1, 1)).to_simple()
    with pytest.raises(ValueError):
        g.relabel((1, 1, 2))


def test_evaluate_checks_dimensions():
    g = WeightedGame(1, (1, 1))
    with pytest.raises(DimensionError):
        evaluate(g, Coalition(3, 1))
    with pytest.raises(DimensionError):
        evaluate(g, 4)
    assert evaluate(g, Coalition.from_members(2, [2])) == 1


@given(st.one_of(weighted_strategy(), simple_tables4.map(lambda t: SimpleGame(4, t))))
def test_text_format_round_trip(g):
    assert parse_game(format_game(g)).table == g.table


def test_text_format_variants(tmp_path):
    assert parse_game("[5;4,1,1,1,1]") == WeightedGame(5, (4, 1, 1, 1, 1))
    c = parse_game("csg:3:100|011")
    assert isinstance(c, CompleteGame)
    for bad in ("nonsense", "xx:3:1", "wvg:2:1;1,1,1", "csg:3:11"):
        with pytest.raises((InvalidGameError, ValueError)):
            parse_game(bad)
    path = tmp_path / "games.txt"
    games = [WeightedGame(1, (1,)), c, SimpleGame(2, 0b1000)]
    assert write_games(path, games, header="mixed") == 3
    back, count = read_games(path)
    assert count == 3 and [g.table for g in back] == [g.table for g in games]
