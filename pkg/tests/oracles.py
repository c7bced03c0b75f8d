"""Brute-force reference implementations used only by the tests.

Nothing here imports the package's algorithms: coalitions are plain Python
sets of voters 1..n and every quantity is recomputed from its definition.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from math import comb, factorial


def mask_to_set(n: int, mask: int) -> frozenset[int]:
    return frozenset(i for i in range(1, n + 1) if mask >> (n - i) & 1)


def set_to_mask(n: int, s) -> int:
    return sum(1 << (n - i) for i in s)


def all_coalitions(n: int) -> list[frozenset[int]]:
    return [frozenset(c) for k in range(n + 1) for c in combinations(range(1, n + 1), k)]


def win_fn(n: int, table: int):
    return lambda s: bool(table >> set_to_mask(n, s) & 1)


def bz_oracle(n: int, wins) -> tuple[Fraction, ...]:
    eta = [0] * n
    for s in all_coalitions(n):
        for i in range(1, n + 1):
            if i not in s and not wins(s) and wins(s | {i}):
                eta[i - 1] += 1
    m = sum(eta)
    return tuple(Fraction(e, m) for e in eta)


def ss_oracle(n: int, wins) -> tuple[Fraction, ...]:
    piv = [0] * n
    for order in permutations(range(1, n + 1)):
        s: set[int] = set()
        for i in order:
            if not wins(frozenset(s)) and wins(frozenset(s | {i})):
                piv[i - 1] += 1
                break
            s.add(i)
    return tuple(Fraction(p, factorial(n)) for p in piv)


def swing_counts(n: int, wins) -> list[int]:
    return [
        sum(1 for s in all_coalitions(n) if i not in s and not wins(s) and wins(s | {i}))
        for i in range(1, n + 1)
    ]


# --- shift order -------------------------------------------------------------


@lru_cache(maxsize=None)
def shift_up_closure(n: int, mask: int) -> frozenset[int]:
    """Everything reachable by adding a voter or swapping a member for a stronger outsider."""
    seen = {mask}
    todo = [mask]
    while todo:
        s = mask_to_set(n, todo.pop())
        nxt = [s | {i} for i in range(1, n + 1) if i not in s]
        nxt += [(s - {j}) | {i} for j in s for i in range(1, j) if i not in s]
        for t in nxt:
            m = set_to_mask(n, t)
            if m not in seen:
                seen.add(m)
                todo.append(m)
    return frozenset(seen)


def shift_leq_oracle(n: int, u: int, v: int) -> bool:
    return v in shift_up_closure(n, u)


# --- game families -----------------------------------------------------------


def is_monotone(n: int, wins) -> bool:
    return all(
        wins(s | {i}) for s in all_coalitions(n) if wins(s) for i in range(1, n + 1)
    )


@lru_cache(maxsize=None)
def simple_game_tables(n: int) -> tuple[int, ...]:
    """All simple games on n <= 4 voters by scanning every Boolean function."""
    assert n <= 4
    size = 1 << n
    out = []
    for table in range(1 << size):
        if table & 1 or not table >> (size - 1) & 1:
            continue
        if is_monotone(n, win_fn(n, table)):
            out.append(table)
    return tuple(out)


def desirable(n: int, wins, i: int, j: int) -> bool:
    """i at least as desirable as j."""
    return all(
        wins((s - {j}) | {i}) for s in all_coalitions(n) if j in s and i not in s and wins(s)
    )


def complete_ordered_tables(n: int) -> tuple[int, ...]:
    """Simple games with 1 ⊒ 2 ⊒ ... ⊒ n."""
    return tuple(
        t
        for t in simple_game_tables(n)
        if all(desirable(n, win_fn(n, t), i, i + 1) for i in range(1, n))
    )


@lru_cache(maxsize=None)
def weighted_tables(n: int, wmax: int) -> frozenset[int]:
    """Tables of [q; w] for all non-increasing weights in 0..wmax."""
    out = set()
    for w in product(range(wmax + 1), repeat=n):
        if any(w[k] < w[k + 1] for k in range(n - 1)):
            continue
        total = sum(w)
        for q in range(1, total + 1):
            t = 0
            for mask in range(1 << n):
                if sum(w[i - 1] for i in mask_to_set(n, mask)) >= q:
                    t |= 1 << mask
            out.add(t)
    return frozenset(out)


def shift_minimal(n: int, table: int) -> list[int]:
    wins = [m for m in range(1 << n) if table >> m & 1]
    return sorted(
        (u for u in wins if not any(v != u and shift_leq_oracle(n, v, u) for v in wins)),
        reverse=True,
    )


def forced_losing_oracle(n: int, W: tuple[int, ...]) -> set[int]:
    """Coalitions losing in every complete game whose shift-minimal list starts with W."""
    completions = [
        t for t in complete_ordered_tables(n) if tuple(shift_minimal(n, t)[: len(W)]) == W
    ]
    return {m for m in range(1 << n) if not any(t >> m & 1 for t in completions)}


def shift_maximal(n: int, vectors: set[int]) -> list[int]:
    return sorted(
        (u for u in vectors if not any(v != u and shift_leq_oracle(n, u, v) for v in vectors)),
        reverse=True,
    )


# --- inverse problem ---------------------------------------------------------


def l1(a, b) -> Fraction:
    return sum((abs(Fraction(x) - Fraction(y)) for x, y in zip(a, b)), Fraction(0))


def naive_optimum(n: int, tables, d, index: str) -> Fraction:
    f = ss_oracle if index == "ss" else bz_oracle
    return min(l1(f(n, win_fn(n, t)), d) for t in tables)


def aggregated_bound_oracle(n: int, d, index: str) -> Fraction:
    """Sum over voters of the distance from d_i to the nearest value
    sum_j j!(n-1-j)!/n! * z_j with 0 <= z_j <= C(n-1, j), by full enumeration."""
    assert index == "ss"
    vals = set()
    for z in product(*(range(comb(n - 1, j) + 1) for j in range(n))):
        vals.add(sum(Fraction(factorial(j) * factorial(n - 1 - j), factorial(n)) * zj for j, zj in enumerate(z)))
    vals = sorted(vals)
    return sum((min(abs(v - Fraction(x)) for v in vals) for x in d), Fraction(0))
