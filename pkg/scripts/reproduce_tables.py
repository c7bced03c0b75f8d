#!/usr/bin/env python3
"""Recompute the published tables and print them next to the printed values.

    python3 scripts/reproduce_tables.py [--max-n 7] [--skip-eu]
"""

import argparse
import time
from fractions import Fraction

from inverse_power import reference as ref
from inverse_power.core import parse_game
from inverse_power.enumeration import count_games, iter_games
from inverse_power.instances import eu_target, hard_target
from inverse_power.inverse import InverseInstance, solve_exhaustive, solve_branch_and_bound, verify_witness
from inverse_power.power import power_vector, render_decimal, render_significant


def sig6(x: Fraction) -> str:
    return "0" if x == 0 else render_significant(x, 6)


def mark(ok: bool) -> str:
    return "ok" if ok else "DIFF"


def power_table():
    print("== power vectors (3 decimals, half-even)")
    for game, (ss_ref, bz_ref) in ref.POWER_TABLE.items():
        g = parse_game(game)
        ss = power_vector(g, "ss").rounded(3)
        bz = power_vector(g, "bz").rounded(3)
        print(f"{game:18} SS {' '.join(ss)}  {mark(ss == ss_ref)}")
        print(f"{'':18} BZ {' '.join(bz)}  {mark(bz == bz_ref)}")


def counts(max_n: int):
    print("== game counts")
    for cls, limit in (("sg", 5), ("csg", max_n), ("wvg", max_n)):
        for n in range(1, limit + 1):
            t = time.perf_counter()
            c = count_games(cls, n)
            print(f"{cls:4} n={n}: {c:>8}  printed {ref.GAME_COUNTS[cls][n - 1]:>8}  {mark(c == ref.GAME_COUNTS[cls][n - 1])}  {time.perf_counter() - t:.1f}s")


def hard(max_n: int, games):
    print("== hard_n optima over weighted games")
    for n in range(2, max_n + 1):
        t = hard_target(n)
        ss = solve_exhaustive(InverseInstance(t, "ss", "wvg"), games=games[n]).best_deviation
        bz = solve_exhaustive(InverseInstance(t, "bz", "wvg"), games=games[n]).best_deviation
        bnb = solve_branch_and_bound(InverseInstance(t, "bz", "wvg")).best_deviation
        printed = ref.HARD_BZ_DECIMAL[n]
        print(
            f"hard_{n}: SS {ss} {mark(ss == ref.HARD_SS_OPTIMUM[n])}   BZ {bz} = {render_decimal(bz, 7)}"
            f" printed {printed} {mark(render_decimal(bz, 7) == printed)}  bnb {mark(bnb == bz)}"
        )
    print("== published hard_n Banzhaf representations")
    for n, w in ref.HARD_BZ_WITNESS.items():
        dev = verify_witness(parse_game(w), hard_target(n), "bz")
        print(f"hard_{n}: {w} -> {render_decimal(dev, 7)}  {mark(render_decimal(dev, 7) == ref.HARD_BZ_DECIMAL[n])}")


def eu(max_n: int, games):
    print("== EU instances, Shapley-Shubik (6 significant digits)")
    for n in range(1, max_n + 1):
        t = eu_target(n)
        dev = solve_exhaustive(InverseInstance(t, "ss", "wvg"), games=games[n]).best_deviation
        printed = ref.EU_SS_WVG[n]
        print(f"EU_{n}: optimum {sig6(dev)}  printed {printed}  {mark(sig6(dev) == printed or dev == 0 and printed == '0')}")
    print("== published EU representations")
    for n, w in ref.EU_SS_WVG_WITNESS.items():
        dev = verify_witness(parse_game(w), eu_target(n), "ss")
        printed = ref.EU_SS_WVG[n]
        print(f"EU_{n}: {w} -> {sig6(dev)}  printed {printed}  {mark(sig6(dev) == printed or dev == 0)}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-n", type=int, default=7, help="largest n enumerated for complete and weighted games")
    ap.add_argument("--skip-eu", action="store_true")
    args = ap.parse_args()
    power_table()
    counts(args.max_n)
    games = {n: iter_games("wvg", n) for n in range(1, args.max_n + 1)}
    hard(args.max_n, games)
    if not args.skip_eu:
        eu(args.max_n, games)


if __name__ == "__main__":
    main()
