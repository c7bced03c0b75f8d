"""Coalitions, the shift order and the three game classes.

Bit convention: for ``n`` voters, voter ``i`` (1-based) is bit ``n - i`` of a
coalition mask, so voter 1 is the most significant position and the
lexicographic order on characteristic vectors is the integer order on masks.

A simple game is stored as a truth table: a Python ``int`` whose bit at
position ``mask`` is ``chi(mask)``.  All table-level operations (swings,
duals, desirability) are a handful of big-integer shifts and ands.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

MAX_VOTERS = 24
# ⪯ poset tables are materialised as dense bitsets up to this many voters
MAX_POSET_VOTERS = 12


class DimensionError(ValueError):
    """Two objects over different voter counts were combined."""


class InvalidGameError(ValueError):
    """Data does not describe a valid game of the requested class."""


class NotCompleteError(ValueError):
    """A game is not complete, or its voters are not in desirability order.

    ``permutation`` is set when the game is complete but needs relabelling:
    ``permutation[k]`` is the (1-based) voter that must move to position
    ``k + 1``.
    """

    def __init__(self, message: str, permutation: tuple[int, ...] | None = None):
        super().__init__(message)
        self.permutation = permutation


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_VOTERS:
        raise ValueError(f"voter count must be in 1..{MAX_VOTERS}, got {n}")


def voter_bit(n: int, i: int) -> int:
    """Mask of the singleton coalition {i}."""
    if not 1 <= i <= n:
        raise ValueError(f"voter {i} out of range 1..{n}")
    return 1 << (n - i)


def members(n: int, mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(1, n + 1) if mask >> (n - i) & 1)


def bitstring(n: int, mask: int) -> str:
    return format(mask, f"0{n}b")


def prefix_sums(n: int, mask: int) -> tuple[int, ...]:
    out = []
    s = 0
    for k in range(n - 1, -1, -1):
        s += mask >> k & 1
        out.append(s)
    return tuple(out)


def shift_leq(n: int, u: int, v: int) -> bool:
    """u ⪯ v: every prefix sum of u is at most the matching prefix sum of v."""
    su = sv = 0
    for k in range(n - 1, -1, -1):
        su += u >> k & 1
        sv += v >> k & 1
        if su > sv:
            return False
    return True


@dataclass(frozen=True, order=True)
class Coalition:
    """A subset of {1..n} stored as a bitmask (voter 1 = most significant bit)."""

    n: int
    mask: int

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.mask < 1 << self.n:
            raise ValueError(f"mask {self.mask} out of range for n={self.n}")

    @classmethod
    def from_members(cls, n: int, voters: Iterable[int]) -> "Coalition":
        mask = 0
        for i in voters:
            mask |= voter_bit(n, i)
        return cls(n, mask)

    @classmethod
    def from_vector(cls, vector: Sequence[int]) -> "Coalition":
        mask = 0
        for u in vector:
            if u not in (0, 1):
                raise ValueError("characteristic vectors are 0/1")
            mask = mask << 1 | u
        return cls(len(vector), mask)

    @classmethod
    def from_bitstring(cls, s: str) -> "Coalition":
        return cls.from_vector([int(c) for c in s.strip()])

    @property
    def vector(self) -> tuple[int, ...]:
        return tuple(self.mask >> (self.n - i) & 1 for i in range(1, self.n + 1))

    @property
    def members(self) -> tuple[int, ...]:
        return members(self.n, self.mask)

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def __str__(self) -> str:
        return bitstring(self.n, self.mask)


class ShiftRelation(enum.Enum):
    LESS = "⪯"  # u ≺ v
    GREATER = "⪰"  # v ≺ u
    EQUAL = "="
    INCOMPARABLE = "⋈"


def shift_compare(u: Coalition, v: Coalition) -> ShiftRelation:
    if u.n != v.n:
        raise DimensionError(f"cannot compare coalitions over {u.n} and {v.n} voters")
    if u.mask == v.mask:
        return ShiftRelation.EQUAL
    if shift_leq(u.n, u.mask, v.mask):
        return ShiftRelation.LESS
    if shift_leq(u.n, v.mask, u.mask):
        return ShiftRelation.GREATER
    return ShiftRelation.INCOMPARABLE


def _right_shifts(n: int, mask: int) -> list[int]:
    # a 1 directly followed by a 0 moves one place right; a trailing 1 drops off
    out = []
    for k in range(n - 1, 0, -1):
        if mask >> k & 1 and not mask >> (k - 1) & 1:
            out.append(mask ^ (0b11 << (k - 1)))
    if mask & 1 and mask != 1:
        out.append(mask ^ 1)
    return out


def _left_shifts(n: int, mask: int) -> list[int]:
    # inverse of _right_shifts: the upper covers of mask in ⪯
    out = []
    for k in range(n - 1, 0, -1):
        if not mask >> k & 1 and mask >> (k - 1) & 1:
            out.append(mask ^ (0b11 << (k - 1)))
    if not mask & 1:
        out.append(mask | 1)
    return out


def right_shift_successors(v: Coalition) -> frozenset[Coalition]:
    """The vectors covered by ``v`` in ⪯ (excluding the empty coalition)."""
    if v.mask == 0:
        raise ValueError("the empty coalition has no right-shift successors")
    return frozenset(Coalition(v.n, m) for m in _right_shifts(v.n, v.mask))


class DesirabilityRelation(enum.Enum):
    STRICTLY_MORE = "⊐"
    STRICTLY_LESS = "⊏"
    EQUIVALENT = "□"
    INCOMPARABLE = "⋈"


@dataclass(frozen=True)
class TableMasks:
    """Constant bitsets over the 2^n coalition positions of a truth table."""

    n: int
    all: int
    without: tuple[int, ...]  # without[p]: positions whose mask lacks bit p
    by_size: tuple[int, ...]  # by_size[j]: positions whose mask has j bits


@lru_cache(maxsize=None)
def table_masks(n: int) -> TableMasks:
    _check_n(n)
    size = 1 << n
    idx = np.arange(size, dtype=np.int64)
    pop = np.zeros(size, dtype=np.int64)
    for p in range(n):
        pop += (idx >> p) & 1

    def pack(flags: np.ndarray) -> int:
        return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")

    without = tuple(pack(((idx >> p) & 1) == 0) for p in range(n))
    by_size = tuple(pack(pop == j) for j in range(n + 1))
    return TableMasks(n, (1 << size) - 1, without, by_size)


def table_from_flags(flags: np.ndarray) -> int:
    """Truth table int from a boolean array indexed by coalition mask."""
    return int.from_bytes(np.packbits(flags.astype(bool), bitorder="little").tobytes(), "little")


class ShiftPoset:
    """Dense ⪯ relation on {0,1}^n, as bitsets indexed by mask.

    ``up[v]`` holds every u with u ⪰ v; ``strict_down[v]`` every u with u ≺ v.
    """

    def __init__(self, n: int):
        if not 1 <= n <= MAX_POSET_VOTERS:
            raise ValueError(f"shift poset supported for 1 <= n <= {MAX_POSET_VOTERS}")
        self.n = n
        size = 1 << n
        idx = np.arange(size, dtype=np.int64)
        bits = np.stack([(idx >> (n - 1 - k)) & 1 for k in range(n)], axis=1)
        ps = np.cumsum(bits, axis=1)
        # geq[a, b]  <=>  a ⪰ b
        geq = np.ones((size, size), dtype=bool)
        for k in range(n):
            geq &= ps[:, k][:, None] >= ps[:, k][None, :]
        self.up = tuple(table_from_flags(geq[:, v]) for v in range(size))
        leq = geq.T
        self.strict_down = tuple(
            table_from_flags(leq[:, v]) & ~(1 << v) for v in range(size)
        )
        self.lower_covers = tuple(tuple(_right_shifts(n, v)) for v in range(size))
        self.upper_covers = tuple(
            sum(1 << u for u in _left_shifts(n, v)) for v in range(size)
        )


@lru_cache(maxsize=None)
def shift_poset(n: int) -> ShiftPoset:
    return ShiftPoset(n)


def iter_bits(x: int) -> Iterator[int]:
    """Positions of the set bits of ``x``, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass(frozen=True)
class SimpleGame:
    """A monotone Boolean function with chi(∅)=0 and chi(N)=1."""

    n: int
    table: int = field(repr=False)

    def __post_init__(self):
        _check_n(self.n)
        tm = table_masks(self.n)
        t = self.table
        if t < 0 or t > tm.all:
            raise InvalidGameError("truth table has bits outside the 2^n positions")
        if t & 1:
            raise InvalidGameError("the empty coalition must lose")
        if not t >> ((1 << self.n) - 1) & 1:
            raise InvalidGameError("the grand coalition must win")
        for p in range(self.n):
            low = tm.without[p]
            # chi(U) <= chi(U + {voter at bit p}) for U lacking p
            if t & low & ~(t >> (1 << p)):
                raise InvalidGameError("game is not monotone")

    def wins(self, mask: int) -> bool:
        return bool(self.table >> mask & 1)

    def winning(self) -> list[int]:
        return list(iter_bits(self.table))

    def minimal_winning(self) -> list[Coalition]:
        tm = table_masks(self.n)
        t = self.table
        reducible = 0
        for p in range(self.n):
            # positions U containing p with U - p winning
            reducible |= (t & tm.without[p]) << (1 << p)
        return [Coalition(self.n, m) for m in iter_bits(t & ~reducible)]

    def maximal_losing(self) -> list[Coalition]:
        tm = table_masks(self.n)
        lose = tm.all & ~self.table
        extendable = 0
        for p in range(self.n):
            # positions U lacking p with U + p losing
            extendable |= (lose >> (1 << p)) & tm.without[p]
        return [Coalition(self.n, m) for m in iter_bits(lose & ~extendable)]

    def null_voters(self) -> set[int]:
        used = 0
        for c in self.minimal_winning():
            used |= c.mask
        return {i for i in range(1, self.n + 1) if not used & voter_bit(self.n, i)}

    def dual(self) -> "SimpleGame":
        size = 1 << self.n
        rev = int(format(self.table, f"0{size}b")[::-1], 2)
        return SimpleGame(self.n, table_masks(self.n).all & ~rev)

    def _dominates(self, i: int, j: int) -> bool:
        # i ⊒ j: chi(U - j + i) >= chi(U) whenever j ∈ U, i ∉ U
        n, t = self.n, self.table
        tm = table_masks(n)
        pi, pj = n - i, n - j
        sel = tm.without[pi] & ~tm.without[pj]
        delta = (1 << pi) - (1 << pj)
        moved = t >> delta if delta > 0 else t << -delta
        return not (t & sel & ~moved)

    def desirability(self, i: int, j: int) -> DesirabilityRelation:
        if i == j:
            raise ValueError("desirability compares two distinct voters")
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise ValueError(f"voters must lie in 1..{self.n}")
        a, b = self._dominates(i, j), self._dominates(j, i)
        if a and b:
            return DesirabilityRelation.EQUIVALENT
        if a:
            return DesirabilityRelation.STRICTLY_MORE
        if b:
            return DesirabilityRelation.STRICTLY_LESS
        return DesirabilityRelation.INCOMPARABLE

    def is_complete(self) -> bool:
        return all(
            self._dominates(i, j) or self._dominates(j, i)
            for i in range(1, self.n + 1)
            for j in range(i + 1, self.n + 1)
        )

    def desirability_order(self) -> tuple[int, ...]:
        """Voters sorted most-desirable first (stable); requires completeness."""
        if not self.is_complete():
            raise NotCompleteError("desirability is not a total preorder")
        order = list(range(1, self.n + 1))
        # insertion sort with the ⊒ comparison, stable on equivalent voters
        for k in range(1, len(order)):
            x = order[k]
            m = k
            while m > 0 and not self._dominates(order[m - 1], x):
                order[m] = order[m - 1]
                m -= 1
            order[m] = x
        return tuple(order)

    def to_complete(self) -> "CompleteGame":
        order = self.desirability_order()
        if not all(self._dominates(i, i + 1) for i in range(1, self.n)):
            raise NotCompleteError(
                "voters are not sorted by desirability; relabel with the permutation",
                permutation=order,
            )
        t = self.table
        shift_min = [
            m
            for m in iter_bits(t)
            if not any(t >> c & 1 for c in _right_shifts(self.n, m))
        ]
        return CompleteGame(self.n, tuple(sorted(shift_min, reverse=True)))

    def relabel(self, perm: Sequence[int]) -> "SimpleGame":
        """Game in which new voter k+1 plays the role of old voter perm[k]."""
        n = self.n
        if sorted(perm) != list(range(1, n + 1)):
            raise ValueError("not a permutation of the voters")
        flags = np.zeros(1 << n, dtype=bool)
        for m in range(1 << n):
            old = 0
            for k, src in enumerate(perm):
                if m >> (n - 1 - k) & 1:
                    old |= voter_bit(n, src)
            flags[m] = self.table >> old & 1
        return SimpleGame(n, table_from_flags(flags))

    def to_simple(self) -> "SimpleGame":
        return self

    def encode(self) -> str:
        return format_game(self)


@dataclass(frozen=True)
class CompleteGame:
    """Complete simple game given by its shift-minimal winning vectors.

    Voters are assumed ordered 1 ⊒ 2 ⊒ … ⊒ n.  ``shift_min_winning`` holds
    masks in lex-descending order.
    """

    n: int
    shift_min_winning: tuple[int, ...]

    def __post_init__(self):
        _check_n(self.n)
        w = tuple(int(m) for m in self.shift_min_winning)
        if not w:
            raise InvalidGameError("a complete game needs at least one winning vector")
        if any(not 0 < m < 1 << self.n for m in w):
            raise InvalidGameError("shift-minimal winning vectors must be non-zero n-bit masks")
        if list(w) != sorted(set(w), reverse=True):
            raise InvalidGameError("vectors must be distinct and lex-descending")
        for a in range(len(w)):
            for b in range(a + 1, len(w)):
                if shift_leq(self.n, w[b], w[a]):
                    raise InvalidGameError(
                        f"{bitstring(self.n, w[b])} ⪯ {bitstring(self.n, w[a])}: not an antichain"
                    )
        object.__setattr__(self, "shift_min_winning", w)

    @classmethod
    def trusted(cls, n: int, shift_min_winning: tuple[int, ...], table: int | None = None) -> "CompleteGame":
        """Skip validation; for generators that construct antichains by design."""
        g = object.__new__(cls)
        object.__setattr__(g, "n", n)
        object.__setattr__(g, "shift_min_winning", shift_min_winning)
        if table is not None:
            g.__dict__["table"] = table
        return g

    @cached_property
    def table(self) -> int:
        n = self.n
        if n <= MAX_POSET_VOTERS:
            up = shift_poset(n).up
            t = 0
            for m in self.shift_min_winning:
                t |= up[m]
            return t
        flags = np.zeros(1 << n, dtype=bool)
        for u in range(1 << n):
            flags[u] = any(shift_leq(n, m, u) for m in self.shift_min_winning)
        return table_from_flags(flags)

    def wins(self, mask: int) -> bool:
        return bool(self.table >> mask & 1)

    def to_simple(self) -> SimpleGame:
        return SimpleGame(self.n, self.table)

    def shift_max_losing(self) -> tuple[int, ...]:
        """Losing vectors all of whose upper covers win, lex-descending."""
        t = self.table
        lose = [m for m in range(1 << self.n) if not t >> m & 1]
        out = [m for m in lose if all(t >> c & 1 for c in _left_shifts(self.n, m))]
        return tuple(sorted(out, reverse=True))

    def encode(self) -> str:
        return format_game(self)


@dataclass(frozen=True)
class WeightedGame:
    """Weighted voting game [q; w_1, …, w_n] with non-increasing weights."""

    q: int
    w: tuple[int, ...]

    def __post_init__(self):
        w = tuple(int(x) for x in self.w)
        object.__setattr__(self, "w", w)
        _check_n(len(w))
        if any(x < 0 for x in w):
            raise InvalidGameError("weights must be non-negative")
        if any(w[k] < w[k + 1] for k in range(len(w) - 1)):
            raise InvalidGameError("weights must be non-increasing")
        if self.q <= 0:
            raise InvalidGameError("quota must be positive")
        if self.q > sum(w):
            raise InvalidGameError("quota exceeds total weight; the grand coalition would lose")

    @property
    def n(self) -> int:
        return len(self.w)

    def weight(self, mask: int) -> int:
        n = self.n
        return sum(self.w[i - 1] for i in range(1, n + 1) if mask >> (n - i) & 1)

    def wins(self, mask: int) -> bool:
        return self.weight(mask) >= self.q

    @cached_property
    def table(self) -> int:
        n = self.n
        idx = np.arange(1 << n, dtype=np.int64)
        sums = np.zeros(1 << n, dtype=object if sum(self.w) >= 2**62 else np.int64)
        for i, wi in enumerate(self.w, start=1):
            sums = sums + ((idx >> (n - i)) & 1) * wi
        return table_from_flags(sums >= self.q)

    def to_simple(self) -> SimpleGame:
        return SimpleGame(self.n, self.table)

    def __str__(self) -> str:
        return f"[{self.q};{','.join(map(str, self.w))}]"

    def encode(self) -> str:
        return format_game(self)


Game = Union[SimpleGame, CompleteGame, WeightedGame]


def evaluate(game: Game, coalition: Coalition | int) -> int:
    """chi(U) as 0/1."""
    if isinstance(coalition, Coalition):
        if coalition.n != game.n:
            raise DimensionError(f"coalition over {coalition.n} voters, game over {game.n}")
        mask = coalition.mask
    else:
        mask = int(coalition)
        if not 0 <= mask < 1 << game.n:
            raise DimensionError(f"mask {mask} does not fit {game.n} voters")
    return int(game.wins(mask))


def remove_voter(g: SimpleGame, i: int) -> SimpleGame:
    """Restriction of ``g`` to the coalitions without voter ``i``, relabelled."""
    n = g.n
    if n < 2:
        raise ValueError("cannot remove the only voter")
    p = n - i
    low = (1 << p) - 1
    flags = np.zeros(1 << (n - 1), dtype=bool)
    for m in range(1 << (n - 1)):
        old = (m & ~low) << 1 | (m & low)
        flags[m] = g.table >> old & 1
    return SimpleGame(n - 1, table_from_flags(flags))


# --- text format -----------------------------------------------------------


def format_game(game: Game) -> str:
    if isinstance(game, WeightedGame):
        return f"wvg:{game.n}:{game.q};{','.join(map(str, game.w))}"
    if isinstance(game, CompleteGame):
        return f"csg:{game.n}:" + "|".join(bitstring(game.n, m) for m in game.shift_min_winning)
    digits = max(1, (1 << game.n) // 4)
    # bit k of the hex number is chi(mask k)
    return f"sg:{game.n}:{game.table:0{digits}x}"


def parse_game(text: str) -> Game:
    """Parse one game line; also accepts the bracket form ``[q;w1,…,wn]``."""
    s = text.strip()
    if s.startswith("[") and s.endswith("]"):
        q, _, ws = s[1:-1].partition(";")
        w = tuple(int(x) for x in ws.split(","))
        return WeightedGame(int(q), w)
    try:
        kind, n_s, body = s.split(":", 2)
        n = int(n_s)
    except ValueError as exc:
        raise InvalidGameError(f"unparsable game line: {text!r}") from exc
    if kind == "sg":
        return SimpleGame(n, int(body, 16))
    if kind == "csg":
        vecs = [Coalition.from_bitstring(b) for b in body.split("|")]
        if any(v.n != n for v in vecs):
            raise InvalidGameError("vector length does not match n")
        return CompleteGame(n, tuple(v.mask for v in vecs))
    if kind == "wvg":
        q, _, ws = body.partition(";")
        g = WeightedGame(int(q), tuple(int(x) for x in ws.split(",")))
        if g.n != n:
            raise InvalidGameError("weight count does not match n")
        return g
    raise InvalidGameError(f"unknown game kind {kind!r}")


def read_games(path) -> tuple[list[Game], int | None]:
    """Games from a text file plus the ``#count:`` trailer value if present."""
    games: list[Game] = []
    count = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("#count:"):
                    count = int(line[len("#count:"):])
                continue
            games.append(parse_game(line))
    return games, count


def write_games(path, games: Iterable[Game], header: str | None = None) -> int:
    count = 0
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        for g in games:
            fh.write(format_game(g) + "\n")
            count += 1
        fh.write(f"#count:{count}\n")
    return count
