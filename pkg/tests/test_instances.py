from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from inverse_power.instances import (
    EU,
    EU_POPULATION,
    TargetParseError,
    eec_target,
    eu_target,
    hard_target,
    load_target,
    parse_number,
    parse_target,
    penrose_target,
    save_target,
    sqrt_rational,
)


@given(st.integers(1, 10**9))
def test_sqrt_truncation(x):
    r = sqrt_rational(x)
    assert r.denominator <= 10**12 and (10**12) % r.denominator == 0
    assert r * r <= x < (r + F(1, 10**12)) ** 2


def test_penrose_target_shape():
    for n in (1, 2, 7, len(EU_POPULATION)):
        t = eu_target(n)
        assert t.n == n and sum(t.d) == 1 and t.label == f"EU_{n}"
    assert eu_target(1).d == (1,)
    # ratio of the two largest entries is the ratio of truncated roots
    t = eu_target(2)
    pops = sorted((p for _, p in EU.rows), reverse=True)
    assert t.d[0] / t.d[1] == sqrt_rational(pops[0]) / sqrt_rational(pops[1])
    with pytest.raises(ValueError):
        eu_target(0)
    with pytest.raises(ValueError):
        penrose_target([4, 9], 3)
    assert penrose_target([9, 4, 1]).d == (F(1, 2), F(1, 3), F(1, 6))


def test_eec_and_hard():
    t = eec_target()
    assert t.n == 6 and sum(t.d) == 1
    assert hard_target(4).d == (F(3, 4), F(1, 4), 0, 0)
    with pytest.raises(ValueError):
        hard_target(1)


def test_parse_number():
    assert parse_number("3/8") == F(3, 8)
    assert parse_number("0.125") == F(1, 8)
    assert parse_number("1e-2") == F(1, 100)
    with pytest.raises(ValueError):
        parse_number("x")


def test_parse_target_forms():
    assert parse_target("1/4, 3/4").d == (F(3, 4), F(1, 4))
    assert parse_target("share\n0.5\n0.25\n0.25\n").d == (F(1, 2), F(1, 4), F(1, 4))
    assert parse_target("# comment\n2,1,1", normalize=True).d == (F(1, 2), F(1, 4), F(1, 4))
    with pytest.raises(TargetParseError):
        parse_target("2,1,1")
    with pytest.raises(TargetParseError):
        parse_target("0,0", normalize=True)
    with pytest.raises(TargetParseError):
        parse_target("0.5,-0.5,1")
    with pytest.raises(TargetParseError):
        parse_target("")
    with pytest.raises(TargetParseError):
        parse_target("0.5\nabc\n0.5")


@given(raw=st.lists(st.integers(0, 50), min_size=1, max_size=8).filter(any))
def test_save_load_round_trip(tmp_path_factory, raw):
    path = tmp_path_factory.mktemp("t") / "target.csv"
    t = parse_target(",".join(map(str, raw)), normalize=True)
    save_target(path, t)
    back = load_target(path)
    assert back.d == t.d and back.permutation == t.permutation
    assert back.to_original(back.d) == tuple(F(x, sum(raw)) for x in raw)
