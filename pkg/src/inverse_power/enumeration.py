"""Exhaustive generation of simple, complete and weighted voting games.

Complete games are generated in orderly fashion: a node is a lex-descending
antichain W of shift-minimal winning vectors, and its children append one
vector that is lex-smaller than every element of W and not strictly below
any of them.  Every node is a complete game, so the node count is the game
count.  Weighted games are the nodes passing an exact LP test; nodes whose
partial LP is infeasible are cut together with their subtree.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from pathlib import Path
from typing import Callable, Iterator, Sequence

import numpy as np

from .core import (
    CompleteGame,
    InvalidGameError,
    SimpleGame,
    WeightedGame,
    iter_bits,
    read_games,
    shift_poset,
    write_games,
)
from .exact_lp import GE, LE, LinearProgram, solve

SG_MAX = 6
CSG_MAX = 8
SLOW = {"sg": 6, "csg": 8, "wvg": 8}


class LimitExceeded(ValueError):
    """n is outside the range a generator supports."""


def _check_limit(n: int, hi: int) -> None:
    if not 1 <= n <= hi:
        raise LimitExceeded(f"n={n} outside supported range 1..{hi}")


# --- simple games ----------------------------------------------------------


@lru_cache(maxsize=None)
def _monotone_tables(k: int) -> np.ndarray:
    """All monotone Boolean functions on k variables as uint64 truth tables (k <= 6)."""
    if k == 0:
        return np.array([0, 1], dtype=np.uint64)
    prev = _monotone_tables(k - 1)
    half = np.uint64(1 << (k - 1))
    chunks = []
    for f0 in prev:
        # f0 ⊆ f1 pointwise: the function with the new variable absent is smaller
        f1 = prev[(f0 & ~prev) == 0]
        chunks.append(f0 | (f1 << half))
    return np.concatenate(chunks)


def simple_game_tables(n: int) -> np.ndarray:
    """Truth tables of every simple game on n labelled voters, ascending."""
    _check_limit(n, SG_MAX)
    t = _monotone_tables(n)
    full = np.uint64((1 << (1 << n)) - 1) if n < 6 else np.uint64(0xFFFFFFFFFFFFFFFF)
    # χ(∅)=0 drops the constant 1 function; χ(N)=1 drops the constant 0
    keep = (t & np.uint64(1)) == 0
    keep &= t != 0
    keep &= t != full
    return np.sort(t[keep])


def enumerate_simple_games(n: int, visitor: Callable[[SimpleGame], None] | None = None) -> int:
    tables = simple_game_tables(n)
    if visitor is not None:
        for t in tables:
            visitor(SimpleGame(n, int(t)))
    return int(tables.size)


# --- orderly generation of complete games ----------------------------------


@dataclass
class Node:
    """A partial complete game: W so far plus what its completions can still add."""

    n: int
    W: tuple[int, ...]
    table: int  # coalitions ⪰ some element of W
    blocked: int  # coalitions ≺ some element of W

    @property
    def w_min(self) -> int:
        return self.W[-1]

    @property
    def candidates(self) -> int:
        """Vectors that may still be appended: non-zero, lex-smaller than w_min, not below W."""
        return ((1 << self.w_min) - 1) & ~self.blocked & ~1

    def game(self) -> CompleteGame:
        return CompleteGame.trusted(self.n, self.W, self.table)

    def reachable(self) -> int:
        """Coalitions winning in at least one completion."""
        up = shift_poset(self.n).up
        t = self.table
        for x in iter_bits(self.candidates):
            t |= up[x]
        return t

    def forced_losing(self) -> int:
        """Bitset of the coalitions losing in every completion."""
        return ((1 << (1 << self.n)) - 1) & ~self.reachable()

    def partial_losing(self) -> tuple[int, ...]:
        return _maximal(self.n, self.forced_losing())


def _maximal(n: int, down_closed: int) -> tuple[int, ...]:
    covers = shift_poset(n).upper_covers
    return tuple(
        sorted((v for v in iter_bits(down_closed) if not covers[v] & down_closed), reverse=True)
    )


def _children(node: Node) -> Iterator[Node]:
    up = shift_poset(node.n).up
    sd = shift_poset(node.n).strict_down
    cand = node.candidates
    while cand:
        x = cand.bit_length() - 1
        cand ^= 1 << x
        yield Node(node.n, node.W + (x,), node.table | up[x], node.blocked | sd[x])


def first_level(n: int) -> list[Node]:
    sp = shift_poset(n)
    return [Node(n, (x,), sp.up[x], sp.strict_down[x]) for x in range((1 << n) - 1, 0, -1)]


def walk(n: int, enter: Callable[[Node], bool], roots: Sequence[Node] | None = None) -> int:
    """Depth-first walk of the orderly tree; ``enter`` returns False to skip a subtree.

    Returns the number of nodes passed to ``enter``.
    """
    stack = list(reversed(roots if roots is not None else first_level(n)))
    seen = 0
    while stack:
        node = stack.pop()
        seen += 1
        if enter(node):
            kids = list(_children(node))
            kids.reverse()
            stack.extend(kids)
    return seen


def _count_csg(n: int, roots: Sequence[int]) -> int:
    sd = shift_poset(n).strict_down
    total = 0

    def rec(w_min: int, blocked: int) -> int:
        cand = ((1 << w_min) - 1) & ~blocked & ~1
        c = 0
        while cand:
            x = cand.bit_length() - 1
            cand ^= 1 << x
            c += 1 + rec(x, blocked | sd[x])
        return c

    for x in roots:
        total += 1 + rec(x, sd[x])
    return total


def _parallel(fn, n: int, threads: int) -> int:
    roots = list(range((1 << n) - 1, 0, -1))
    parts = [roots[k::threads] for k in range(threads)]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return sum(ex.map(fn, [n] * threads, parts))


def enumerate_complete_games(
    n: int, visitor: Callable[[CompleteGame], None] | None = None, threads: int = 1
) -> int:
    _check_limit(n, CSG_MAX)
    if visitor is None:
        if threads > 1:
            return _parallel(_count_csg, n, threads)
        return _count_csg(n, range((1 << n) - 1, 0, -1))

    def enter(node: Node) -> bool:
        visitor(node.game())
        return True

    return walk(n, enter)


# --- weightedness ----------------------------------------------------------


def weightedness_lp(n: int, winning: Sequence[int], losing: Sequence[int]) -> LinearProgram:
    """LP in (w_1..w_n, q): winning vectors reach q, losing ones stay at q-1 or below."""
    if not winning:
        raise InvalidGameError("need at least one winning vector")
    lp = LinearProgram()
    for i in range(1, n + 1):
        lp.add_variable(f"w{i}")
    lp.add_variable("q")
    for u in winning:
        lp.add_constraint([u >> (n - i) & 1 for i in range(1, n + 1)] + [-1], GE, 0)
    for v in losing:
        lp.add_constraint([v >> (n - i) & 1 for i in range(1, n + 1)] + [-1], LE, -1)
    for i in range(n - 1):
        row = [0] * (n + 1)
        row[i], row[i + 1] = 1, -1
        lp.add_constraint(row, GE, 0)
    return lp


def _shift_max_losing(n: int, table: int) -> tuple[int, ...]:
    return _maximal(n, ((1 << (1 << n)) - 1) & ~table)


@lru_cache(maxsize=1 << 16)
def _weights_for(n: int, W: tuple[int, ...], table: int) -> WeightedGame | None:
    out = solve(weightedness_lp(n, W, _shift_max_losing(n, table)), mode="feasibility")
    if not out.feasible:
        return None
    vals = [out.assignment[f"w{i}"] for i in range(1, n + 1)] + [out.assignment["q"]]
    scale = lcm(*(Fraction(v).denominator for v in vals))
    ints = [int(v * scale) for v in vals]
    g = WeightedGame(ints[-1], tuple(ints[:-1]))
    if g.table != table:
        raise RuntimeError("weights from the LP do not induce the complete game")
    return g


def is_weighted(c: CompleteGame) -> WeightedGame | None:
    """Integer weights for ``c`` if it is weighted, else None."""
    return _weights_for(c.n, tuple(c.shift_min_winning), c.table)


@lru_cache(maxsize=1 << 16)
def _partial_feasible(n: int, W: tuple[int, ...], losing: tuple[int, ...]) -> bool:
    return solve(weightedness_lp(n, W, losing), mode="feasibility").feasible


def partial_losing_set(n: int, W: Sequence[int]) -> tuple[int, ...]:
    """Shift-maximal vectors that lose in every completion of W (lex-descending)."""
    W = tuple(W)
    if not W:
        raise InvalidGameError("W must be non-empty")
    CompleteGame(n, W)  # validates the antichain
    sp = shift_poset(n)
    table = blocked = 0
    for u in W:
        table |= sp.up[u]
        blocked |= sp.strict_down[u]
    return Node(n, W, table, blocked).partial_losing()


def extendable_to_weighted(node: Node) -> bool:
    """False if no completion of ``node`` can be weighted (partial LP infeasible)."""
    if _weights_for(node.n, node.W, node.table) is not None:
        return True
    return _partial_feasible(node.n, node.W, node.partial_losing())


def _wvg_walk(n: int, roots, visitor, prune: bool) -> int:
    count = 0

    def enter(node: Node) -> bool:
        nonlocal count
        g = _weights_for(n, node.W, node.table)
        if g is not None:
            count += 1
            if visitor is not None:
                visitor(g)
            return True
        if not prune:
            return True
        return _partial_feasible(n, node.W, node.partial_losing())

    walk(n, enter, roots)
    return count


def _count_wvg(n: int, roots: Sequence[int]) -> int:
    sp = shift_poset(n)
    return _wvg_walk(n, [Node(n, (x,), sp.up[x], sp.strict_down[x]) for x in roots], None, True)


def enumerate_weighted_games(
    n: int,
    visitor: Callable[[WeightedGame], None] | None = None,
    prune: bool = True,
    threads: int = 1,
) -> int:
    """Visit every weighted game on n ordered voters (as integer representations)."""
    _check_limit(n, CSG_MAX)
    if visitor is None and prune and threads > 1:
        return _parallel(_count_wvg, n, threads)
    return _wvg_walk(n, None, visitor, prune)


# --- cache -----------------------------------------------------------------


def count_games(game_class: str, n: int, threads: int = 1) -> int:
    if game_class == "sg":
        return enumerate_simple_games(n)
    if game_class == "csg":
        return enumerate_complete_games(n, threads=threads)
    if game_class == "wvg":
        return enumerate_weighted_games(n, threads=threads)
    raise ValueError(f"unknown game class {game_class!r}")


def iter_games(game_class: str, n: int) -> list:
    out: list = []
    if game_class == "sg":
        enumerate_simple_games(n, out.append)
    elif game_class == "csg":
        enumerate_complete_games(n, out.append)
    elif game_class == "wvg":
        enumerate_weighted_games(n, out.append)
    else:
        raise ValueError(f"unknown game class {game_class!r}")
    return out


def cached_games(game_class: str, n: int, cache_dir: str | os.PathLike | None = None) -> list:
    """Games of a class, read from ``<cache_dir>/<class>_<n>.txt`` when it is intact."""
    if cache_dir is None:
        return iter_games(game_class, n)
    path = Path(cache_dir) / f"{game_class}_{n}.txt"
    if path.exists():
        games, count = read_games(path)
        if count == len(games):
            return games
    games = iter_games(game_class, n)
    path.parent.mkdir(parents=True, exist_ok=True)
    write_games(path, games, header=f"{game_class} n={n}")
    return games
