"""Swing counts and the Banzhaf / Shapley-Shubik power vectors, exactly."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

import numpy as np

from .core import Game, SimpleGame, remove_voter, table_masks


class IndexKind(enum.Enum):
    BANZHAF = "bz"
    SHAPLEY_SHUBIK = "ss"

    @classmethod
    def parse(cls, s: "str | IndexKind") -> "IndexKind":
        if isinstance(s, IndexKind):
            return s
        return cls(s.lower())


@dataclass(frozen=True)
class SwingProfile:
    n: int
    eta: tuple[int, ...]
    # by_size[i][j]: swings of voter i+1 through coalitions of size j
    by_size: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return sum(self.eta)


def render_decimal(x: Fraction, places: int) -> str:
    """Round-half-even to a fixed number of decimal places."""
    q = Decimal(1).scaleb(-places)
    with localcontext() as ctx:
        ctx.prec = 200
        d = Decimal(x.numerator) / Decimal(x.denominator)
        return f"{d.quantize(q, rounding=ROUND_HALF_EVEN):f}"


def render_significant(x: Fraction, digits: int = 7) -> str:
    """Round-half-even to ``digits`` significant digits, scientific notation."""
    if x == 0:
        return f"{0:.{digits - 1}e}"
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = ROUND_HALF_EVEN
        d = +(Decimal(x.numerator) / Decimal(x.denominator))
    return f"{d:.{digits - 1}e}"


@dataclass(frozen=True)
class PowerVector:
    n: int
    values: tuple[Fraction, ...]
    kind: IndexKind

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, k):
        return self.values[k]

    def rounded(self, places: int = 3) -> tuple[str, ...]:
        return tuple(render_decimal(v, places) for v in self.values)

    def sorted_desc(self) -> tuple[Fraction, ...]:
        return tuple(sorted(self.values, reverse=True))


def swing_sets(n: int, table: int) -> list[int]:
    """Per voter, the bitset of coalitions U (as table positions) that are swings."""
    tm = table_masks(n)
    out = []
    for i in range(1, n + 1):
        p = n - i
        out.append((table >> (1 << p)) & ~table & tm.without[p])
    return out


def swings(game: Game) -> SwingProfile:
    """Exact swing counts by voter and by coalition size."""
    n = game.n
    tm = table_masks(n)
    eta = []
    rows = []
    for sw in swing_sets(n, game.table):
        eta.append(sw.bit_count())
        rows.append(tuple((sw & tm.by_size[j]).bit_count() for j in range(n)))
    return SwingProfile(n, tuple(eta), tuple(rows))


@lru_cache(maxsize=None)
def ss_coefficients(n: int) -> tuple[int, ...]:
    """j!(n-1-j)! for j = 0..n-1: the Shapley-Shubik weight of a size-j swing times n!."""
    return tuple(factorial(j) * factorial(n - 1 - j) for j in range(n))


def ss_numerators(n: int, by_size: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Shapley-Shubik values times n!."""
    c = ss_coefficients(n)
    return tuple(sum(cj * zj for cj, zj in zip(c, row)) for row in by_size)


def banzhaf(game: Game) -> PowerVector:
    prof = swings(game)
    m = prof.m
    return PowerVector(prof.n, tuple(Fraction(e, m) for e in prof.eta), IndexKind.BANZHAF)


def shapley_shubik(game: Game) -> PowerVector:
    prof = swings(game)
    nf = factorial(prof.n)
    return PowerVector(
        prof.n,
        tuple(Fraction(p, nf) for p in ss_numerators(prof.n, prof.by_size)),
        IndexKind.SHAPLEY_SHUBIK,
    )


def power_vector(game: Game, kind: IndexKind | str) -> PowerVector:
    kind = IndexKind.parse(kind)
    return banzhaf(game) if kind is IndexKind.BANZHAF else shapley_shubik(game)


def remove_null_voter(game: Game, i: int) -> SimpleGame:
    """Drop null voter ``i``; the remaining voters keep their power under both indices."""
    g = game.to_simple()
    if i not in g.null_voters():
        raise ValueError(f"voter {i} is not a null voter")
    return remove_voter(g, i)


# --- batch evaluation over many truth tables --------------------------------

_WORD = 64
_WORD_MASK = (1 << _WORD) - 1


def tables_to_words(n: int, tables: Sequence[int]) -> np.ndarray:
    """Truth tables as a (G, K) uint64 array, K = max(1, 2^n / 64) words each."""
    k = max(1, (1 << n) // _WORD)
    out = np.empty((len(tables), k), dtype=np.uint64)
    for w in range(k):
        shift = w * _WORD
        out[:, w] = np.fromiter(
            ((t >> shift) & _WORD_MASK for t in tables), dtype=np.uint64, count=len(tables)
        )
    return out


@lru_cache(maxsize=None)
def _word_masks(n: int):
    tm = table_masks(n)
    k = max(1, (1 << n) // _WORD)
    split = lambda x: np.array([(x >> (_WORD * w)) & _WORD_MASK for w in range(k)], dtype=np.uint64)
    return (
        split(tm.all),
        [split(tm.without[p]) for p in range(n)],
        [split(tm.by_size[j]) for j in range(n)],
    )


def batch_swings(n: int, words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Swing counts for many games at once.

    ``words`` comes from :func:`tables_to_words`.  Returns ``eta`` with shape
    (G, n) and ``by_size`` with shape (G, n, n), both int64.
    """
    g, k = words.shape
    full, without, by_size = _word_masks(n)
    eta = np.zeros((g, n), dtype=np.int64)
    z = np.zeros((g, n, n), dtype=np.int64)
    inv = ~words & full
    for i in range(1, n + 1):
        p = n - i
        b = 1 << p
        if b < _WORD:
            sw = (words >> np.uint64(b)) & inv & without[p]
        else:
            s = b // _WORD
            sw = np.zeros_like(words)
            for w in range(k):
                if not (w >> (p - 6)) & 1:
                    sw[:, w] = words[:, w + s] & inv[:, w]
        for j in range(n):
            z[:, i - 1, j] = np.bitwise_count(sw & by_size[j]).sum(axis=1)
        eta[:, i - 1] = z[:, i - 1, :].sum(axis=1)
    return eta, z


