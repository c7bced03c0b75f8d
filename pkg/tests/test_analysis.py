from fractions import Fraction as F
from itertools import combinations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from inverse_power.analysis import (
    CONJECTURE_LIMIT,
    CellClass,
    achievable_projections,
    achievable_vectors,
    ae_corollary,
    alon_edelman_bound,
    cell_meets_lemma,
    closed_form,
    conjecture_terms,
    conjectured_bz_bound,
    lemma71_feasible,
    min_deviation_over_achievable,
    pigeonhole_bound,
    region_grid,
    sorted_simplex_grid,
    swing_gap_bound,
    tau,
    verify_conjecture_sequence,
    verify_worst_case_regions,
)
from inverse_power.enumeration import LimitExceeded
from inverse_power.inverse import InverseInstance, TargetDistribution, solve_exhaustive
from inverse_power.power import banzhaf
from inverse_power.reference import ACHIEVABLE, CONJECTURE_RATIOS

from . import oracles
from .conftest import games_of


def oracle_achievable(n, index, tables):
    f = oracles.ss_oracle if index == "ss" else oracles.bz_oracle
    return sorted({tuple(sorted(f(n, oracles.win_fn(n, t)), reverse=True)) for t in tables}, reverse=True)


@pytest.mark.parametrize("index", ["ss", "bz"])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_achievable_vectors_match_oracle(n, index):
    tables = sorted(oracles.weighted_tables(n, n))
    assert achievable_vectors(n, index) == oracle_achievable(n, index, tables)
    assert achievable_vectors(n, index, "sg") == oracle_achievable(n, index, oracles.simple_game_tables(n))


@pytest.mark.parametrize("key", sorted(ACHIEVABLE))
def test_achievable_vectors_published(key):
    n, index = key
    assert achievable_vectors(n, index) == [tuple(F(x) for x in v) for v in ACHIEVABLE[key]]


def test_achievable_limits():
    with pytest.raises(LimitExceeded):
        achievable_vectors(6, "ss", "sg")
    with pytest.raises(LimitExceeded):
        achievable_vectors(8, "ss")


@given(st.lists(st.integers(0, 9), min_size=4, max_size=4).filter(any), st.sampled_from(["ss", "bz"]))
def test_min_deviation_equals_exhaustive_optimum(raw, index):
    t = TargetDistribution.of([F(x, sum(raw)) for x in raw])
    best, arg = min_deviation_over_achievable(t, 4, index)
    assert best == solve_exhaustive(InverseInstance(t, index, "wvg")).best_deviation
    assert arg and all(oracles.l1(p, t.d) == best for p in arg)


def test_min_deviation_argument_checks():
    with pytest.raises(ValueError):
        min_deviation_over_achievable((F(1, 2), F(1, 2)), 3, "ss")
    with pytest.raises(ValueError):
        min_deviation_over_achievable((F(1, 4), F(3, 4)), 2, "ss")


def test_closed_form_bounds():
    assert ae_corollary(F(1, 100)) == F(1, 50)
    assert ae_corollary(F(1, 18)) == F(1, 9)
    assert alon_edelman_bound(1, F(1, 10)) == F(3, 10) / F(8, 10) + F(1, 10)
    with pytest.raises(ValueError):
        alon_edelman_bound(2, F(1, 3))
    assert pigeonhole_bound(3) == F(1, 48)
    with pytest.raises(ValueError):
        pigeonhole_bound(0)


@pytest.mark.parametrize("n", range(2, 7))
def test_swing_gap_bound_holds(n):
    bound = swing_gap_bound(n)
    for g in games_of("csg", n):
        vals = sorted(set(banzhaf(g).values))
        assert all(b - a >= bound for a, b in zip(vals, vals[1:]))


def test_conjecture_sequence():
    assert [tau(m) for m in range(1, 5)] == [1, 0, 1, 0]
    assert conjecture_terms(1).ratio == F(1, 2)
    for m in range(2, 31):
        r, c = conjecture_terms(m), closed_form(m)
        assert (r.k, r.l) == (c.k, c.l)
    assert verify_conjecture_sequence(30) == []
    assert abs(float(conjecture_terms(30).ratio - CONJECTURE_LIMIT)) < 1e-15
    with pytest.raises(ValueError):
        closed_form(1)
    with pytest.raises(ValueError):
        conjecture_terms(0)


def test_conjectured_bound_published_values():
    for n, value in CONJECTURE_RATIOS.items():
        assert conjectured_bz_bound(n) == value
    assert [conjectured_bz_bound(n) for n in range(2, 8)] == [F(1, 2), F(2, 5), F(2, 5), F(15, 38), F(15, 38), F(30, 79)]


def test_sorted_simplex_grid():
    for n, steps in [(2, 4), (3, 6), (4, 5)]:
        brute = {
            tuple(F(x, steps) for x in v)
            for v in product(range(steps + 1), repeat=n)
            if sum(v) == steps and list(v) == sorted(v, reverse=True)
        }
        grid = sorted_simplex_grid(n, steps)
        assert len(grid) == len(set(grid)) and set(grid) == brute


@pytest.mark.parametrize("n,index", [(2, "ss"), (2, "bz"), (3, "ss"), (3, "bz"), (4, "bz")])
def test_corrected_worst_case_regions(n, index):
    for chk in verify_worst_case_regions(n, index, steps=20, corrected=True):
        assert chk.passed, chk.failures[:3]
        assert chk.region_points and chk.grid_points


def test_published_regions_for_three_shapley_shubik_voters():
    assert all(c.passed for c in verify_worst_case_regions(3, "ss", steps=24))
    with pytest.raises(ValueError):
        verify_worst_case_regions(5, "ss")


@pytest.mark.parametrize("index", ["ss", "bz"])
@pytest.mark.parametrize("cls,upto", [("wvg", 6), ("csg", 6), ("sg", 5)])
def test_projections_satisfy_necessary_conditions(index, cls, upto):
    for n in range(2, upto + 1):
        vecs = achievable_vectors(n, index, cls)
        for i, j in combinations(range(1, n + 1), 2):
            assert all(lemma71_feasible(n, i, j, v[i - 1], v[j - 1]) for v in vecs)


def test_lemma_cells():
    assert lemma71_feasible(3, 1, 2, F(1, 2), F(1, 4))
    assert not lemma71_feasible(3, 1, 2, F(1, 2), F(1, 10))
    assert not lemma71_feasible(3, 2, 3, F(1, 2), F(1, 4))
    with pytest.raises(ValueError):
        lemma71_feasible(3, 2, 2, 0, 0)
    assert cell_meets_lemma(3, 1, 2, F(1, 2), F(3, 5), F(1, 5), F(1, 4))
    assert not cell_meets_lemma(3, 1, 2, 0, F(1, 10), F(2, 5), F(1, 2))


def test_region_grid_classes(tmp_path):
    grid = region_grid(4, "bz", width=40, height=20)
    assert grid.counts.shape == (20, 40)
    for x, y in grid.points:
        c, r = min(int(x * 40), 39), min(int(y * 40), 19)
        assert grid.classes[r][c] in (CellClass.SPARSE, CellClass.DENSE)
    assert grid.points == achievable_projections(4, "bz", "wvg")
    pgm = grid.to_pgm().splitlines()
    assert pgm[0] == "P2" and pgm[2] == "40 20" and len(pgm) == 4 + 20
    grid.write_csv(tmp_path / "g.csv")
    assert len((tmp_path / "g.csv").read_text().splitlines()) == 1 + 800
    with pytest.raises(ValueError):
        region_grid(4, "bz", i=2, j=2)
