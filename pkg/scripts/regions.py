#!/usr/bin/env python3
"""Write projection grids (PGM + CSV) of achievable power vectors onto voters 1 and 2.

    python3 scripts/regions.py --out regions --max-n 6
"""

import argparse
from pathlib import Path

from inverse_power.analysis import CellClass, region_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="regions")
    ap.add_argument("--min-n", type=int, default=3)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--width", type=int, default=200)
    ap.add_argument("--height", type=int, default=100)
    ap.add_argument("--class", dest="game_class", default="wvg")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for n in range(args.min_n, args.max_n + 1):
        for index in ("bz", "ss"):
            grid = region_grid(n, index, width=args.width, height=args.height, game_class=args.game_class)
            stem = out / f"{args.game_class}_{index}_{n}"
            grid.write_pgm(stem.with_suffix(".pgm"))
            grid.write_csv(stem.with_suffix(".csv"))
            tally = ", ".join(f"{c.name.lower()} {sum(r.count(c) for r in grid.classes)}" for c in CellClass)
            print(f"n={n} {index}: {len(grid.points)} points; {tally} -> {stem}.pgm")


if __name__ == "__main__":
    main()
