"""A-priori bounds, the conjectured Banzhaf worst-case sequence, achievable
power vectors, worst-case region checks and projection grids."""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, gcd
from pathlib import Path
from typing import Sequence

import numpy as np

from .enumeration import LimitExceeded, enumerate_complete_games, enumerate_weighted_games, simple_game_tables
from .inverse import GameClass, TargetDistribution
from .power import IndexKind, batch_swings, ss_coefficients, tables_to_words

# --- closed-form bounds ------------------------------------------------------


def pigeonhole_bound(n: int) -> Fraction:
    """Some target lies at least this far (per coordinate) from every power vector."""
    if n < 1:
        raise ValueError("n must be positive")
    return Fraction(1, 2 ** (n + 1) * n)


def swing_gap_bound(n: int) -> Fraction:
    """Two unequal Banzhaf values within one n-voter game differ by at least this."""
    if n < 1:
        raise ValueError("n must be positive")
    h = n // 2 + 1
    return Fraction(2, h * comb(n, h))


def alon_edelman_bound(k: int, eps: Fraction) -> Fraction:
    """Distance to a k-voter game when voters beyond k hold at most eps of the Banzhaf power."""
    eps = Fraction(eps)
    if k < 1 or not 0 < eps < Fraction(1, k + 1):
        raise ValueError("need k >= 1 and 0 < eps < 1/(k+1)")
    return (2 * k + 1) * eps / (1 - (k + 1) * eps) + eps


def ae_corollary(eps: Fraction) -> Fraction:
    """Lower bound on the Banzhaf distance to (3/4, 1/4, 0, ...) derived with k = 2."""
    eps = Fraction(eps)
    return min(Fraction(1, 2) - alon_edelman_bound(2, eps), 2 * eps)


# --- conjectured Banzhaf worst case ---------------------------------------------


def tau(m: int) -> int:
    """1 for odd m, 0 for even m."""
    return ((-1) ** (m + 1) + 1) // 2


@dataclass(frozen=True)
class ConjectureSequence:
    m: int
    k: int
    l: int

    @property
    def tau(self) -> int:
        return tau(self.m)

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.k, self.l)


@lru_cache(maxsize=None)
def conjecture_terms(m: int) -> ConjectureSequence:
    if m < 1:
        raise ValueError("m must be positive")
    if m == 1:
        return ConjectureSequence(1, 1, 2)
    prev = conjecture_terms(m - 1)
    if m % 2 == 0:
        k = 2 * prev.k
        l = 5 if m == 2 else 2 * prev.l + 3
    else:
        k = 8 * prev.k - 1
        l = 8 * prev.l - 2
    return ConjectureSequence(m, k, l)


def closed_form(m: int) -> ConjectureSequence:
    """Non-recursive k_m, l_m (valid for m >= 2)."""
    if m < 2:
        raise ValueError("the closed form holds for m >= 2")
    t = tau(m)
    p = 2 ** (2 * m - 2 + t)
    k, rk = divmod(7 * p + 2 - t, 15)
    lq, rl = divmod(11 * p + 1 - 23 * t, 15)
    if rk or rl:
        raise ArithmeticError(f"closed form is not integral at m={m}")
    return ConjectureSequence(m, k, 2 ** (2 * m - 3 + t) + lq)


def conjectured_bz_bound(n: int) -> Fraction:
    if n < 2:
        raise ValueError("n must be at least 2")
    return conjecture_terms(-(-n // 2)).ratio


CONJECTURE_LIMIT = Fraction(14, 37)


# --- achievable vectors ---------------------------------------------------------


def _class_tables(n: int, game_class: GameClass) -> list[int]:
    if game_class is GameClass.SG:
        return [int(t) for t in simple_game_tables(n)]
    out: list[int] = []
    if game_class is GameClass.CSG:
        enumerate_complete_games(n, lambda g: out.append(g.table))
    else:
        enumerate_weighted_games(n, lambda g: out.append(g.table))
    return out


@lru_cache(maxsize=None)
def _achievable(n: int, kind: IndexKind, game_class: GameClass) -> tuple[tuple[Fraction, ...], ...]:
    tables = _class_tables(n, game_class)
    eta, z = batch_swings(n, tables_to_words(n, tables))
    if kind is IndexKind.SHAPLEY_SHUBIK:
        num = z @ np.array(ss_coefficients(n), dtype=np.int64)
        den = np.full(len(tables), factorial(n), dtype=np.int64)
    else:
        num = eta
        den = eta.sum(axis=1)
    num = -np.sort(-num, axis=1)
    rows = np.unique(np.concatenate([num, den[:, None]], axis=1), axis=0)
    seen = set()
    for row in rows.tolist():
        *nums, d = row
        g = gcd(d, *nums)
        seen.add(tuple(Fraction(x // g, d // g) for x in nums))
    return tuple(sorted(seen, reverse=True))


def achievable_vectors(n: int, index: IndexKind | str, game_class: GameClass | str = GameClass.WVG) -> list[tuple[Fraction, ...]]:
    """Distinct power vectors of a class, coordinates sorted non-increasing, lex-descending."""
    kind = IndexKind.parse(index)
    cls = GameClass.parse(game_class)
    hi = 5 if cls is GameClass.SG else 7
    if not 1 <= n <= hi:
        raise LimitExceeded(f"achievable vectors for {cls.value} supported for n <= {hi}")
    return list(_achievable(n, kind, cls))


def min_deviation_over_achievable(
    d: TargetDistribution | Sequence, n: int, index: IndexKind | str, game_class: GameClass | str = GameClass.WVG
) -> tuple[Fraction, list[tuple[Fraction, ...]]]:
    """Least l1 distance from a sorted target to the achievable set, with all minimisers."""
    dv = d.d if isinstance(d, TargetDistribution) else tuple(Fraction(x) for x in d)
    if len(dv) != n:
        raise ValueError(f"target has {len(dv)} entries for n={n}")
    if any(dv[k] < dv[k + 1] for k in range(n - 1)):
        raise ValueError("target must be sorted non-increasing")
    best = None
    arg: list = []
    for p in achievable_vectors(n, index, game_class):
        dev = sum((abs(a - b) for a, b in zip(p, dv)), Fraction(0))
        if best is None or dev < best:
            best, arg = dev, [p]
        elif dev == best:
            arg.append(p)
    return best, arg


# --- worst-case regions -----------------------------------------------------------

F = Fraction


@dataclass(frozen=True)
class Region:
    """A segment (or a point when a == b) in the sorted simplex."""

    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]

    def contains(self, p: Sequence[Fraction]) -> bool:
        diff = [y - x for x, y in zip(self.a, self.b)]
        if not any(diff):
            return tuple(p) == self.a
        k = next(k for k, v in enumerate(diff) if v)
        t = (p[k] - self.a[k]) / diff[k]
        if not 0 <= t <= 1:
            return False
        return all(x + t * v == q for x, v, q in zip(self.a, diff, p))

    def samples(self) -> list[tuple[Fraction, ...]]:
        mid = tuple((x + y) / 2 for x, y in zip(self.a, self.b))
        return [self.a, mid, self.b]


def _seg(a, b) -> Region:
    return Region(tuple(F(x) for x in a), tuple(F(x) for x in b))


def _pt(a) -> Region:
    return _seg(a, a)


@dataclass(frozen=True)
class WorstCaseLemma:
    name: str
    n: int
    index: IndexKind
    value: Fraction
    regions: tuple[Region, ...]


_HALF, _THIRD, _SIXTH, _TWELFTH = F(1, 2), F(1, 3), F(1, 6), F(1, 12)

WORST_CASE_LEMMAS: dict[tuple[int, IndexKind], list[WorstCaseLemma]] = {}
# Same lemmas with the Banzhaf regions enlarged to what exhaustive search finds:
# along d_1 + d_2 = 1, every d_1 in [7/10, 4/5] is exactly 2/5 away from both
# (1/2, 1/2, 0, ...) and (3/5, 1/5, 1/5, 0, ...), not only d_1 = 3/4.
CORRECTED_WORST_CASE_LEMMAS: dict[tuple[int, IndexKind], list[WorstCaseLemma]] = {}


def _register(lemma: WorstCaseLemma, corrected: WorstCaseLemma | None = None) -> None:
    WORST_CASE_LEMMAS.setdefault((lemma.n, lemma.index), []).append(lemma)
    CORRECTED_WORST_CASE_LEMMAS.setdefault((lemma.n, lemma.index), []).append(corrected or lemma)


for _kind in IndexKind:
    _register(WorstCaseLemma("A.1", 2, _kind, _HALF, (_pt((F(3, 4), F(1, 4))),)))
_register(
    WorstCaseLemma(
        "A.2",
        3,
        IndexKind.SHAPLEY_SHUBIK,
        _THIRD,
        (
            _seg((F(5, 6), _TWELFTH, _TWELFTH), (F(5, 6), _SIXTH, 0)),
            _seg((F(2, 3), _THIRD, 0), (F(5, 6), _SIXTH, 0)),
            _seg((_HALF, _THIRD, _SIXTH), (F(2, 3), _THIRD, 0)),
            _seg((_HALF, F(1, 4), F(1, 4)), (_HALF, _THIRD, _SIXTH)),
            _seg((F(5, 12), F(5, 12), _SIXTH), (_HALF, _THIRD, _SIXTH)),
        ),
    )
)
_register(
    WorstCaseLemma(
        "A.3",
        3,
        IndexKind.BANZHAF,
        F(2, 5),
        (
            _seg((F(4, 5), F(1, 10), F(1, 10)), (F(4, 5), F(1, 5), 0)),
            _pt((F(3, 4), F(1, 4), 0)),
        ),
    ),
    WorstCaseLemma(
        "A.3",
        3,
        IndexKind.BANZHAF,
        F(2, 5),
        (
            _seg((F(4, 5), F(1, 10), F(1, 10)), (F(4, 5), F(1, 5), 0)),
            _seg((F(7, 10), F(3, 10), 0), (F(4, 5), F(1, 5), 0)),
        ),
    ),
)
_register(
    WorstCaseLemma(
        "A.4",
        4,
        IndexKind.BANZHAF,
        F(2, 5),
        (_pt((F(4, 5), F(1, 5), 0, 0)), _pt((F(3, 4), F(1, 4), 0, 0))),
    ),
    WorstCaseLemma(
        "A.4",
        4,
        IndexKind.BANZHAF,
        F(2, 5),
        (_seg((F(7, 10), F(3, 10), 0, 0), (F(4, 5), F(1, 5), 0, 0)),),
    ),
)


def sorted_simplex_grid(n: int, steps: int) -> list[tuple[Fraction, ...]]:
    """All non-increasing vectors with entries in (1/steps)·N summing to one."""
    out = []

    def rec(prefix: list[int], left: int, cap: int) -> None:
        if len(prefix) == n - 1:
            if left <= cap:
                out.append(tuple(F(x, steps) for x in prefix + [left]))
            return
        slots = n - len(prefix)
        for x in range(min(cap, left), -1, -1):
            if x * slots < left:
                break
            rec(prefix + [x], left - x, x)

    rec([], steps, steps)
    return out


@dataclass
class LemmaCheck:
    lemma: str
    n: int
    index: IndexKind
    value: Fraction
    region_points: int = 0
    grid_points: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_worst_case_regions(
    n: int, index: IndexKind | str, steps: int = 60, corrected: bool = False
) -> list[LemmaCheck]:
    """Sample each worst-case lemma: on its regions the optimum equals the lemma's
    value; everywhere else on the grid it is strictly smaller.

    ``corrected=True`` checks the enlarged Banzhaf regions instead of the
    published ones.
    """
    kind = IndexKind.parse(index)
    table = CORRECTED_WORST_CASE_LEMMAS if corrected else WORST_CASE_LEMMAS
    lemmas = table.get((n, kind))
    if not lemmas:
        raise ValueError(f"no worst-case lemma for n={n} and {kind.value}")
    grid = sorted_simplex_grid(n, steps)
    out = []
    for lem in lemmas:
        chk = LemmaCheck(lem.name, n, kind, lem.value)
        for reg in lem.regions:
            for p in reg.samples():
                chk.region_points += 1
                got, _ = min_deviation_over_achievable(p, n, kind, GameClass.WVG)
                if got != lem.value:
                    chk.failures.append(f"region point {_fmt(p)}: optimum {got}, expected {lem.value}")
        for p in grid:
            chk.grid_points += 1
            inside = any(r.contains(p) for r in lem.regions)
            got, _ = min_deviation_over_achievable(p, n, kind, GameClass.WVG)
            if inside and got != lem.value:
                chk.failures.append(f"grid point {_fmt(p)} in region: optimum {got} != {lem.value}")
            elif not inside and got >= lem.value:
                chk.failures.append(f"grid point {_fmt(p)} off regions: optimum {got} >= {lem.value}")
        out.append(chk)
    return out


def _fmt(p) -> str:
    return "(" + ", ".join(str(x) for x in p) + ")"


# --- projections ---------------------------------------------------------------


def lemma71_feasible(n: int, i: int, j: int, x, y) -> bool:
    """Necessary conditions for (x, y) = (P(i), P(j)) of a sorted power vector."""
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    x, y = F(x), F(y)
    if not 1 >= x >= y >= 0:
        return False
    if i == 1 and (j - 1) * x + (n - j + 1) * y < 1:
        return False
    return i * x + (j - i) * y <= 1


def _halfplanes(n: int, i: int, j: int) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Lemma 7.1 as a·x + b·y <= c."""
    hp = [(F(1), F(0), F(1)), (F(-1), F(1), F(0)), (F(0), F(-1), F(0)), (F(i), F(j - i), F(1))]
    if i == 1:
        hp.append((F(-(j - 1)), F(-(n - j + 1)), F(-1)))
    return hp


def _clip(poly: list[tuple[Fraction, Fraction]], a, b, c) -> list[tuple[Fraction, Fraction]]:
    out = []
    for k, p in enumerate(poly):
        q = poly[(k + 1) % len(poly)]
        fp = a * p[0] + b * p[1] - c
        fq = a * q[0] + b * q[1] - c
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def cell_meets_lemma(n: int, i: int, j: int, x0, x1, y0, y1) -> bool:
    """Whether the closed rectangle meets the Lemma 7.1 polygon (exact clipping)."""
    poly = [(F(x0), F(y0)), (F(x1), F(y0)), (F(x1), F(y1)), (F(x0), F(y1))]
    for a, b, c in _halfplanes(n, i, j):
        poly = _clip(poly, a, b, c)
        if not poly:
            return False
    return True


class CellClass(enum.Enum):
    EXCLUDED = 0
    EMPTY = 64
    SPARSE = 160
    DENSE = 255


@dataclass
class RegionGrid:
    n: int
    index: IndexKind
    game_class: GameClass
    i: int
    j: int
    width: int
    height: int
    radius: int
    threshold: int
    points: list[tuple[Fraction, Fraction]]
    counts: np.ndarray  # (height, width): points in the cell's neighbourhood
    classes: list[list[CellClass]]

    def cell_bounds(self, r: int, c: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (
            F(c, self.width),
            F(c + 1, self.width),
            F(r, 2 * self.height),
            F(r + 1, 2 * self.height),
        )

    def to_pgm(self) -> str:
        lines = ["P2", "# classes: excluded=0 empty=64 sparse=160 dense=255", f"{self.width} {self.height}", "255"]
        for row in self.classes:
            lines.append(" ".join(str(c.value) for c in row))
        return "\n".join(lines) + "\n"

    def write_pgm(self, path) -> None:
        Path(path).write_text(self.to_pgm())

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x_lo", "x_hi", "y_lo", "y_hi", "count", "class"])
            for r in range(self.height):
                for c in range(self.width):
                    x0, x1, y0, y1 = self.cell_bounds(r, c)
                    w.writerow([x0, x1, y0, y1, int(self.counts[r, c]), self.classes[r][c].name.lower()])


def achievable_projections(n: int, index, game_class, i: int = 1, j: int = 2) -> list[tuple[Fraction, Fraction]]:
    vecs = achievable_vectors(n, index, game_class)
    return sorted({(v[i - 1], v[j - 1]) for v in vecs})


def region_grid(
    n: int,
    index: IndexKind | str,
    i: int = 1,
    j: int = 2,
    width: int = 200,
    height: int = 100,
    radius: int = 1,
    threshold: int = 8,
    game_class: GameClass | str = GameClass.WVG,
) -> RegionGrid:
    """Classify the cells of [0,1] x [0,1/2] by the projected achievable vectors.

    ``radius`` is in cells (Chebyshev); ``threshold`` separates sparse from dense.
    Row 0 is the strip with the smallest P(j).
    """
    kind = IndexKind.parse(index)
    cls = GameClass.parse(game_class)
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= n, got i={i}, j={j}")
    if n > 7:
        raise LimitExceeded("region grids supported for n <= 7")
    pts = achievable_projections(n, kind, cls, i, j)
    own = np.zeros((height, width), dtype=np.int64)
    for x, y in pts:
        c = min(int(x * width), width - 1)
        r = min(int(y * 2 * height), height - 1)
        own[r, c] += 1
    pad = np.pad(own, radius)
    counts = np.zeros_like(own)
    for dr in range(2 * radius + 1):
        for dc in range(2 * radius + 1):
            counts += pad[dr : dr + height, dc : dc + width]
    classes = []
    for r in range(height):
        row = []
        for c in range(width):
            x0, x1 = F(c, width), F(c + 1, width)
            y0, y1 = F(r, 2 * height), F(r + 1, 2 * height)
            if not cell_meets_lemma(n, i, j, x0, x1, y0, y1):
                row.append(CellClass.EXCLUDED)
            elif counts[r, c] == 0:
                row.append(CellClass.EMPTY)
            elif counts[r, c] <= threshold:
                row.append(CellClass.SPARSE)
            else:
                row.append(CellClass.DENSE)
        classes.append(row)
    return RegionGrid(n, kind, cls, i, j, width, height, radius, threshold, pts, counts, classes)


# --- consistency of the sequence -------------------------------------------------


def verify_conjecture_sequence(upto: int = 30) -> list[str]:
    """Mismatches between the recursion and the closed form for 2 <= m <= upto."""
    bad = []
    for m in range(2, upto + 1):
        r, c = conjecture_terms(m), closed_form(m)
        if (r.k, r.l) != (c.k, c.l):
            bad.append(f"m={m}: recursion {r.k}/{r.l}, closed form {c.k}/{c.l}")
    return bad

