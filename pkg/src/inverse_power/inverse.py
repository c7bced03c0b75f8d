"""Exact solvers for the inverse power index problem under the l1 norm.

Given a target distribution d and an index P, find games in a class
minimising sum_i |P_i - d_i|.  Two exact methods:

* :func:`solve_exhaustive` scores every game of the class.  Scores are first
  computed in floating point over batches of truth tables; every game within
  ``1e-9`` of the batch minimum is then re-scored exactly, so the reported
  optimum and witnesses are exact.
* :func:`solve_branch_and_bound` walks the orderly tree of complete games and
  cuts a subtree when an interval bound on the power of every completion
  already exceeds the incumbent.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

from .core import (
    DimensionError,
    Game,
    SimpleGame,
    format_game,
    table_masks,
)
from .enumeration import (
    CSG_MAX,
    SG_MAX,
    LimitExceeded,
    Node,
    _partial_feasible,
    _weights_for,
    enumerate_complete_games,
    enumerate_weighted_games,
    simple_game_tables,
    walk,
)
from .power import (
    IndexKind,
    PowerVector,
    batch_swings,
    power_vector,
    ss_coefficients,
    tables_to_words,
)

BNB_MAX = 10
WITNESS_CAP = 64
_FLOAT_SLACK = 1e-9


class GameClass(enum.Enum):
    SG = "sg"
    CSG = "csg"
    WVG = "wvg"

    @classmethod
    def parse(cls, s: "str | GameClass") -> "GameClass":
        return s if isinstance(s, GameClass) else cls(s.lower())


@dataclass(frozen=True)
class TargetDistribution:
    """Non-negative rationals summing to one, sorted non-increasing.

    ``permutation[k]`` is the original (1-based) position of sorted entry k.
    """

    d: tuple[Fraction, ...]
    label: str = ""
    permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        d = tuple(Fraction(x) for x in self.d)
        object.__setattr__(self, "d", d)
        if not d:
            raise ValueError("empty target")
        if any(x < 0 for x in d):
            raise ValueError("target entries must be non-negative")
        if sum(d) != 1:
            raise ValueError(f"target sums to {sum(d)}, not 1")
        if any(d[k] < d[k + 1] for k in range(len(d) - 1)):
            raise ValueError("target must be sorted non-increasing; use TargetDistribution.of")
        if self.permutation is None:
            object.__setattr__(self, "permutation", tuple(range(1, len(d) + 1)))

    @classmethod
    def of(cls, values: Sequence, label: str = "") -> "TargetDistribution":
        """Sort ``values`` (stable, descending) and remember where each came from."""
        vals = [Fraction(v) for v in values]
        order = sorted(range(len(vals)), key=lambda k: -vals[k])
        return cls(tuple(vals[k] for k in order), label, tuple(k + 1 for k in order))

    @property
    def n(self) -> int:
        return len(self.d)

    def as_floats(self) -> np.ndarray:
        return np.array([float(x) for x in self.d])

    def to_original(self, values: Sequence) -> tuple:
        """Reorder per-voter values from sorted positions back to the caller's order."""
        out = [None] * self.n
        for k, orig in enumerate(self.permutation):
            out[orig - 1] = values[k]
        return tuple(out)

    def relabel_game(self, game: Game) -> SimpleGame:
        """The game with voters renamed to the caller's original positions."""
        # original voter permutation[k] plays sorted voter k + 1
        inverse = [0] * self.n
        for k, orig in enumerate(self.permutation):
            inverse[orig - 1] = k + 1
        return game.to_simple().relabel(inverse)


@dataclass(frozen=True)
class InverseInstance:
    target: TargetDistribution
    index: IndexKind
    game_class: GameClass

    def __post_init__(self):
        object.__setattr__(self, "index", IndexKind.parse(self.index))
        object.__setattr__(self, "game_class", GameClass.parse(self.game_class))

    @property
    def n(self) -> int:
        return self.target.n


@dataclass
class InverseResult:
    instance: InverseInstance
    best_deviation: Fraction
    witnesses: list[Game]
    optimal_count: int
    nodes_visited: int
    elapsed: float
    method: str = ""
    extras: dict = field(default_factory=dict)


def deviation(p: PowerVector | Sequence, d: TargetDistribution | Sequence) -> Fraction:
    pv = tuple(p)
    dv = d.d if isinstance(d, TargetDistribution) else tuple(Fraction(x) for x in d)
    if len(pv) != len(dv):
        raise DimensionError(f"power vector has {len(pv)} entries, target {len(dv)}")
    return sum((abs(Fraction(a) - b) for a, b in zip(pv, dv)), Fraction(0))


def verify_witness(game: Game, d: TargetDistribution | Sequence, index: IndexKind | str) -> Fraction:
    """Exact deviation of ``game`` from ``d`` under ``index``."""
    return deviation(power_vector(game, index), d)


# --- witness bookkeeping ---------------------------------------------------


class _Incumbent:
    def __init__(self, collect_ties: bool):
        self.best: Fraction | None = None
        self.best_f = float("inf")
        self.games: list[tuple[str, Game]] = []
        self.count = 0
        self.collect_ties = collect_ties

    def offer(self, dev: Fraction, game: Game) -> None:
        if self.best is None or dev < self.best:
            self.best = dev
            self.best_f = float(dev)
            self.games = []
            self.count = 0
        if dev == self.best:
            self.count += 1
            self.games.append((format_game(game), game))
            if len(self.games) > 16 * WITNESS_CAP:
                self._trim()

    def _trim(self) -> None:
        self.games.sort(key=lambda t: t[0])
        del self.games[WITNESS_CAP:]

    def witnesses(self) -> list[Game]:
        self._trim()
        keep = WITNESS_CAP if self.collect_ties else 1
        return [g for _, g in self.games[:keep]]


# --- exhaustive ------------------------------------------------------------


def _float_power(n: int, kind: IndexKind, words: np.ndarray) -> np.ndarray:
    eta, z = batch_swings(n, words)
    if kind is IndexKind.BANZHAF:
        return eta / eta.sum(axis=1, keepdims=True)
    c = np.array(ss_coefficients(n), dtype=np.float64)
    return (z.astype(np.float64) @ c) / factorial(n)


def _scan_batch(inst: InverseInstance, games: Sequence[Game], words: np.ndarray, inc: _Incumbent) -> None:
    if not len(games):
        return
    p = _float_power(inst.n, inst.index, words)
    dev = np.abs(p - inst.target.as_floats()).sum(axis=1)
    cut = min(dev.min(), inc.best_f) + _FLOAT_SLACK
    for k in np.flatnonzero(dev <= cut):
        g = games[k]
        inc.offer(verify_witness(g, inst.target, inst.index), g)


class _LazyGames:
    def __init__(self, n: int, tables: np.ndarray):
        self.n, self.tables = n, tables

    def __len__(self):
        return len(self.tables)

    def __getitem__(self, k):
        return SimpleGame(self.n, int(self.tables[k]))


def _batches(items: list, size: int) -> Iterable[list]:
    for s in range(0, len(items), size):
        yield items[s : s + size]


def solve_exhaustive(
    inst: InverseInstance,
    collect_ties: bool = True,
    batch: int = 1 << 16,
    games: Sequence[Game] | None = None,
) -> InverseResult:
    """Score every game of the class; ``games`` may supply a pre-enumerated list."""
    n = inst.n
    cls = inst.game_class
    limit = SG_MAX if cls is GameClass.SG else CSG_MAX
    if not 1 <= n <= limit:
        raise LimitExceeded(f"exhaustive search over {cls.value} supports n <= {limit}")
    t0 = time.perf_counter()
    inc = _Incumbent(collect_ties)
    total = 0
    if games is not None:
        if any(g.n != n for g in games):
            raise DimensionError("supplied games do not match the target size")
        for chunk in _batches(list(games), batch):
            _scan_batch(inst, chunk, tables_to_words(n, [g.table for g in chunk]), inc)
        total = len(games)
    elif cls is GameClass.SG:
        tables = simple_game_tables(n)
        for s in range(0, len(tables), batch):
            chunk = tables[s : s + batch]
            _scan_batch(inst, _LazyGames(n, chunk), chunk.reshape(-1, 1), inc)
        total = len(tables)
    else:
        found: list[Game] = []
        if cls is GameClass.CSG:
            enumerate_complete_games(n, found.append)
        else:
            enumerate_weighted_games(n, found.append)
        for chunk in _batches(found, batch):
            _scan_batch(inst, chunk, tables_to_words(n, [g.table for g in chunk]), inc)
        total = len(found)
    return InverseResult(
        inst, inc.best, inc.witnesses(), inc.count, total, time.perf_counter() - t0, "exhaustive"
    )


# --- aggregated lower bound --------------------------------------------------


def _aggregated_terms(n: int) -> list[tuple[int, int]]:
    """(coefficient, upper bound) per aggregated swing size class, largest coefficient first."""
    terms = []
    for j in range((n - 1) // 2 + 1 if n >= 2 else 1):
        coef = factorial(j) * factorial(n - 1 - j)
        if 2 * j == n - 1:
            bound = comb(n - 1, j)
        else:
            bound = 2 * comb(n - 1, j)
        terms.append((coef, bound))
    return terms


def _closest_sum(terms: list[tuple[int, int]], target: int) -> int:
    """min |sum c_j z_j - target| over integers 0 <= z_j <= b_j (depth-first with pruning)."""
    rest = [0] * (len(terms) + 1)
    for k in range(len(terms) - 1, -1, -1):
        rest[k] = rest[k + 1] + terms[k][0] * terms[k][1]
    best = abs(target)

    def rec(k: int, acc: int) -> None:
        nonlocal best
        gap = target - acc
        if k == len(terms) or best == 0:
            best = min(best, abs(gap))
            return
        c, b = terms[k]
        # only z with acc + c z in [target - rest_{k+1} - best, target + best] can improve
        lo = max(0, -((-(gap - rest[k + 1] - best)) // c))
        hi = min(b, (gap + best) // c)
        # try the values nearest the target first
        mid = min(max(gap // c, lo), hi)
        order = sorted(range(lo, hi + 1), key=lambda z: abs(z - mid))
        for z in order:
            rec(k + 1, acc + c * z)

    rec(0, 0)
    return best


def aggregated_lower_bound(n: int, d: TargetDistribution | Sequence, index: IndexKind | str = IndexKind.SHAPLEY_SHUBIK) -> Fraction:
    """Lower bound on the Shapley-Shubik optimum over all simple games.

    Each voter's power is a sum over swing sizes of j!(n-1-j)!/n! times a
    bounded swing count; sizes j and n-1-j share a coefficient and are
    merged.  Dropping the requirement that powers sum to one decouples the
    voters, so the bound is the sum of per-voter distances from d_i to the
    nearest reachable value.
    """
    if IndexKind.parse(index) is not IndexKind.SHAPLEY_SHUBIK:
        raise ValueError("the aggregated bound is defined for the Shapley-Shubik index only")
    dv = d.d if isinstance(d, TargetDistribution) else tuple(Fraction(x) for x in d)
    if len(dv) != n:
        raise DimensionError(f"target has {len(dv)} entries for n={n}")
    terms = _aggregated_terms(n)
    nf = factorial(n)
    total = Fraction(0)
    for di in dv:
        den = di.denominator
        scaled = [(c * den, b) for c, b in terms]
        total += Fraction(_closest_sum(scaled, di.numerator * nf), nf * den)
    return total


# --- branch and bound --------------------------------------------------------


@dataclass(frozen=True)
class SwingBounds:
    """Per-voter swing sets of a node: those present in every completion and in some."""

    n: int
    lo_sets: tuple[int, ...]
    hi_sets: tuple[int, ...]


def node_swing_bounds(node: Node, reach: int | None = None) -> SwingBounds:
    n = node.n
    tm = table_masks(n)
    forced = node.table
    reach = node.reachable() if reach is None else reach
    forced_lose = tm.all & ~reach
    lo, hi = [], []
    for i in range(1, n + 1):
        p = n - i
        b = 1 << p
        lo.append((forced >> b) & forced_lose & tm.without[p])
        hi.append((reach >> b) & ~forced & tm.without[p])
    return SwingBounds(n, tuple(lo), tuple(hi))


def _ss_numerator(n: int, sw: int) -> int:
    tm = table_masks(n)
    c = ss_coefficients(n)
    return sum(c[j] * (sw & tm.by_size[j]).bit_count() for j in range(n))


def power_intervals(bounds: SwingBounds, kind: IndexKind | str) -> tuple[list[Fraction], list[Fraction]]:
    """Exact [lo_i, hi_i] containing voter i's power in every completion."""
    kind = IndexKind.parse(kind)
    n = bounds.n
    if kind is IndexKind.SHAPLEY_SHUBIK:
        nf = factorial(n)
        lo = [Fraction(_ss_numerator(n, s), nf) for s in bounds.lo_sets]
        hi = [Fraction(_ss_numerator(n, s), nf) for s in bounds.hi_sets]
        return lo, hi
    emin = [s.bit_count() for s in bounds.lo_sets]
    emax = [s.bit_count() for s in bounds.hi_sets]
    smin, smax = sum(emin), sum(emax)
    lo, hi = [], []
    for i in range(n):
        den = emin[i] + smax - emax[i]
        # a zero denominator means every other voter is a null voter, so voter i holds all power
        lo.append(Fraction(emin[i], den) if den else Fraction(1))
        den = emax[i] + smin - emin[i]
        hi.append(Fraction(emax[i], den) if den else Fraction(0))
    return lo, hi


def interval_bound(lo: Sequence, hi: Sequence, d: Sequence) -> Fraction:
    """Least possible l1 distance from d of a distribution with lo <= p <= hi.

    Clamping d into the box gives c; any feasible p satisfies
    |p_i - d_i| = |p_i - c_i| + |c_i - d_i|, and sum |p_i - c_i| >= |1 - sum c|.
    """
    c = [min(max(di, a), b) for di, a, b in zip(d, lo, hi)]
    return sum(abs(ci - di) for ci, di in zip(c, d)) + abs(1 - sum(c))


def _float_intervals(n: int, bounds: SwingBounds, kind: IndexKind, coef: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    tm = table_masks(n)
    if kind is IndexKind.SHAPLEY_SHUBIK:
        def ss(s):
            return float(sum(int(coef[j]) * (s & tm.by_size[j]).bit_count() for j in range(n)))
        nf = float(factorial(n))
        return (
            np.array([ss(s) for s in bounds.lo_sets]) / nf,
            np.array([ss(s) for s in bounds.hi_sets]) / nf,
        )
    lo, hi = power_intervals(bounds, kind)
    return np.array([float(x) for x in lo]), np.array([float(x) for x in hi])


def _float_bound(lo: np.ndarray, hi: np.ndarray, d: np.ndarray) -> float:
    c = np.clip(d, lo, hi)
    return float(np.abs(c - d).sum() + abs(1.0 - c.sum()))


def solve_branch_and_bound(inst: InverseInstance, collect_ties: bool = True) -> InverseResult:
    n = inst.n
    cls = inst.game_class
    if cls is GameClass.SG:
        raise ValueError("branch and bound walks complete games; use solve_exhaustive for simple games")
    if not 1 <= n <= BNB_MAX:
        raise LimitExceeded(f"branch and bound supports n <= {BNB_MAX}")
    t0 = time.perf_counter()
    kind = inst.index
    d = inst.target.d
    df = inst.target.as_floats()
    coef = np.array(ss_coefficients(n), dtype=object)
    inc = _Incumbent(collect_ties)
    pruned = {"bound": 0, "lp": 0}

    def enter(node: Node) -> bool:
        reach = node.reachable()
        sb = node_swing_bounds(node, reach)
        lo, hi = _float_intervals(n, sb, kind, coef)
        if _float_bound(lo, hi, df) > inc.best_f + _FLOAT_SLACK:
            pruned["bound"] += 1
            return False
        if cls is GameClass.WVG:
            g = _weights_for(n, node.W, node.table)
            if g is None:
                if not _partial_feasible(n, node.W, node.partial_losing()):
                    pruned["lp"] += 1
                    return False
                return True
        else:
            g = node.game()
        inc.offer(verify_witness(g, d, kind), g)
        return True

    seen = walk(n, enter)
    return InverseResult(
        inst,
        inc.best,
        inc.witnesses(),
        inc.count,
        seen,
        time.perf_counter() - t0,
        "bnb",
        {"pruned_by_bound": pruned["bound"], "pruned_by_lp": pruned["lp"]},
    )


def solve(
    inst: InverseInstance, method: str = "exhaustive", collect_ties: bool = True, games: Sequence[Game] | None = None
) -> InverseResult:
    if method == "exhaustive":
        return solve_exhaustive(inst, collect_ties, games=games)
    if method == "bnb":
        return solve_branch_and_bound(inst, collect_ties)
    raise ValueError(f"unknown method {method!r}")
