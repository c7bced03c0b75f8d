#!/usr/bin/env python3
"""Solve an exported LP file with scipy's HiGHS MILP and write ``name value`` lines.

Usable as a solver adapter:

    {"command": "python3 scripts/scipy_milp_solver.py {model} {solution}",
     "infeasible_marker": "INFEASIBLE"}
"""

import argparse
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_array

from inverse_power.ilp_models import CONTINUOUS, EQ, GE, LE, read_lp


def solve(path: str, time_limit: float | None):
    model = read_lp(path)
    names = list(model.variables)
    col = {k: j for j, k in enumerate(names)}
    rows, cols, vals, lo, hi = [], [], [], [], []
    for r, c in enumerate(model.constraints):
        # rows are integer and may be huge; scale each by its largest entry
        scale = max(abs(a) for a in list(c.coeffs.values()) + [c.rhs, 1])
        for k, a in c.coeffs.items():
            rows.append(r)
            cols.append(col[k])
            vals.append(a / scale)
        rhs = c.rhs / scale
        lo.append(rhs if c.sense in (GE, EQ) else -np.inf)
        hi.append(rhs if c.sense in (LE, EQ) else np.inf)
    a = coo_array((vals, (rows, cols)), shape=(len(model.constraints), len(names))).tocsr()
    cost = np.zeros(len(names))
    for k, v in model.objective.items():
        cost[col[k]] = -v if model.maximize else v
    vlo = [(-np.inf if v.lower is None else float(v.lower)) for v in model.variables.values()]
    vhi = [(np.inf if v.upper is None else float(v.upper)) for v in model.variables.values()]
    integrality = [0 if v.kind == CONTINUOUS else 1 for v in model.variables.values()]
    options = {"time_limit": time_limit} if time_limit else {}
    cons = [LinearConstraint(a, lo, hi)] if model.constraints else []
    res = milp(cost, constraints=cons, integrality=integrality, bounds=Bounds(vlo, vhi), options=options)
    return names, model, res


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("model")
    ap.add_argument("solution")
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args(argv)
    names, model, res = solve(args.model, args.time_limit)
    if res.status == 2:
        print("INFEASIBLE")
        return 0
    if res.x is None:
        print(f"solver failed: {res.message}", file=sys.stderr)
        return 1
    with open(args.solution, "w") as fh:
        for k, v in zip(names, res.x):
            if model.variables[k].kind != CONTINUOUS:
                v = round(v)
                fh.write(f"{k} {v}\n")
            else:
                fh.write(f"{k} {v:.12g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
