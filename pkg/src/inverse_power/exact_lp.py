"""Exact rational linear programming: two-phase primal simplex with Bland's rule.

The tableau is kept in integers.  Each row is an equation scaled by an
arbitrary positive factor and reduced by its gcd after every pivot, so no
``Fraction`` arithmetic happens inside the pivot loop.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping, Sequence, Union

Number = Union[int, Fraction]

LE, GE, EQ = "<=", ">=", "="


class LpStatus(enum.Enum):
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    FEASIBLE = "feasible"
    OPTIMAL = "optimal"


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    assignment: dict[str, Fraction] | None = None
    objective: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.status in (LpStatus.FEASIBLE, LpStatus.OPTIMAL)


@dataclass
class LinearProgram:
    """Variables with optional bounds, linear rows and an optional objective.

    ``None`` as a bound means unbounded in that direction.
    """

    names: list[str] = field(default_factory=list)
    lower: list[Number | None] = field(default_factory=list)
    upper: list[Number | None] = field(default_factory=list)
    rows: list[tuple[tuple[Number, ...], str, Number]] = field(default_factory=list)
    objective: tuple[Number, ...] | None = None
    maximize: bool = False

    def add_variable(self, name: str, lower: Number | None = 0, upper: Number | None = None) -> int:
        self.names.append(name)
        self.lower.append(lower)
        self.upper.append(upper)
        return len(self.names) - 1

    def add_constraint(self, coeffs: Sequence[Number] | Mapping[int, Number], rel: str, rhs: Number) -> None:
        if rel not in (LE, GE, EQ):
            raise ValueError(f"unknown relation {rel!r}")
        if isinstance(coeffs, Mapping):
            row = [0] * len(self.names)
            for j, a in coeffs.items():
                row[j] = a
            coeffs = row
        if len(coeffs) != len(self.names):
            raise ValueError(
                f"constraint has {len(coeffs)} coefficients for {len(self.names)} variables"
            )
        self.rows.append((tuple(coeffs), rel, rhs))

    def set_objective(self, coeffs: Sequence[Number], maximize: bool = False) -> None:
        if len(coeffs) != len(self.names):
            raise ValueError("objective length does not match the variable count")
        self.objective = tuple(coeffs)
        self.maximize = maximize

    def check(self, x: Sequence[Number]) -> bool:
        """Exact check of bounds and rows at the point ``x``."""
        for v, lo, hi in zip(x, self.lower, self.upper):
            if lo is not None and v < lo:
                return False
            if hi is not None and v > hi:
                return False
        for coeffs, rel, rhs in self.rows:
            s = sum(a * v for a, v in zip(coeffs, x) if a)
            if rel == LE and s > rhs or rel == GE and s < rhs or rel == EQ and s != rhs:
                return False
        return True


def _den(x: Number) -> int:
    return x.denominator if isinstance(x, Fraction) else 1


def _reduce(row: list[int]) -> list[int]:
    g = gcd(*row)
    if g > 1:
        return [v // g for v in row]
    return row


class _Tableau:
    def __init__(self, rows: list[list[int]], basis: list[int], ncols: int):
        self.A = rows
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r: int, q: int, cost: list[list[int]]) -> None:
        A = self.A
        pr = A[r]
        a = pr[q]
        if a < 0:
            pr = A[r] = [-v for v in pr]
            a = -a
        for k in range(len(A)):
            if k == r:
                continue
            f = A[k][q]
            if f:
                A[k] = _reduce([x * a - y * f for x, y in zip(A[k], pr)])
        for idx, R in enumerate(cost):
            f = R[q]
            if f:
                cost[idx] = _reduce([x * a - y * f for x, y in zip(R, pr)])
        self.basis[r] = q

    def ratio_row(self, q: int) -> int | None:
        best = None
        for r, row in enumerate(self.A):
            a = row[q]
            if a <= 0:
                continue
            if best is None:
                best = r
                continue
            # b_r / a_r  vs  b_best / a_best
            lhs = row[-1] * self.A[best][q]
            rhs = self.A[best][-1] * a
            if lhs < rhs or lhs == rhs and self.basis[r] < self.basis[best]:
                best = r
        return best

    def run(self, cost: list[list[int]], allowed: int) -> bool:
        """Minimise cost[0]; columns >= ``allowed`` never enter.  False if unbounded."""
        while True:
            R = cost[0]
            q = next((j for j in range(allowed) if R[j] < 0), None)
            if q is None:
                return True
            r = self.ratio_row(q)
            if r is None:
                return False
            self.pivot(r, q, cost)


def solve(lp: LinearProgram, mode: str = "optimize") -> LpOutcome:
    """Solve ``lp`` exactly.

    ``mode="feasibility"`` stops at the first feasible basis and ignores the
    objective.  Returned assignments are checked against every row.
    """
    if mode not in ("optimize", "feasibility"):
        raise ValueError(f"unknown mode {mode!r}")
    nvar = len(lp.names)
    for coeffs, _, _ in lp.rows:
        if len(coeffs) != nvar:
            raise ValueError("constraint row length does not match the variable count")

    # x_j = offset_j + sum(sign * column)
    offset: list[Number] = []
    cols: list[list[tuple[int, int]]] = []
    extra_rows: list[tuple[dict[int, int], str, Number]] = []
    ncol = 0
    for j in range(nvar):
        lo, hi = lp.lower[j], lp.upper[j]
        if lo is not None and hi is not None and hi < lo:
            return LpOutcome(LpStatus.INFEASIBLE)
        if lo is not None:
            offset.append(lo)
            cols.append([(ncol, 1)])
            if hi is not None:
                extra_rows.append(({ncol: 1}, LE, hi - lo))
            ncol += 1
        elif hi is not None:
            offset.append(hi)
            cols.append([(ncol, -1)])
            ncol += 1
        else:
            offset.append(0)
            cols.append([(ncol, 1), (ncol + 1, -1)])
            ncol += 2
    nstruct = ncol

    raw: list[tuple[dict[int, Number], str, Number]] = []
    for coeffs, rel, rhs in lp.rows:
        row: dict[int, Number] = {}
        shift = 0
        for j, a in enumerate(coeffs):
            if not a:
                continue
            shift += a * offset[j]
            for c, s in cols[j]:
                row[c] = row.get(c, 0) + s * a
        raw.append((row, rel, rhs - shift))
    raw.extend(extra_rows)

    # integerise, make rhs >= 0, add slack and artificial columns
    nslack = sum(1 for _, rel, _ in raw if rel != EQ)
    width = nstruct + nslack + len(raw)
    A: list[list[int]] = []
    basis: list[int] = []
    art_cols: list[int] = []
    s_next = nstruct
    a_next = nstruct + nslack
    for row, rel, rhs in raw:
        m = lcm(_den(rhs), *(_den(a) for a in row.values())) if row else _den(rhs)
        vals = [0] * (width + 1)
        for c, a in row.items():
            vals[c] = int(a * m)
        b = int(rhs * m)
        if b < 0:
            vals = [-v for v in vals]
            b = -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
        vals[-1] = b
        if rel == LE:
            vals[s_next] = 1
            basis.append(s_next)
            s_next += 1
        else:
            if rel == GE:
                vals[s_next] = -1
                s_next += 1
            vals[a_next] = 1
            basis.append(a_next)
            art_cols.append(a_next)
            a_next += 1
        A.append(vals)
    ncols = a_next
    A = [_reduce(r[:ncols] + [r[-1]]) for r in A]
    tab = _Tableau(A, basis, ncols)

    if art_cols:
        art = set(art_cols)
        phase1 = [0] * (ncols + 1)
        for c in art_cols:
            phase1[c] = 1
        for r, b in enumerate(basis):
            if b in art:
                phase1 = [x - y for x, y in zip(phase1, tab.A[r])]
        cost = [_reduce(phase1)]
        tab.run(cost, ncols)
        if cost[0][-1] != 0:
            return LpOutcome(LpStatus.INFEASIBLE)
        # drive zero-valued artificials out of the basis
        r = 0
        while r < len(tab.A):
            if tab.basis[r] in art:
                q = next((j for j in range(nstruct + nslack) if tab.A[r][j]), None)
                if q is None:
                    del tab.A[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, q, cost)
            r += 1
    allowed = nstruct + nslack

    if mode == "optimize" and lp.objective is not None:
        sign = -1 if lp.maximize else 1
        obj: dict[int, Number] = {}
        for j, c in enumerate(lp.objective):
            if not c:
                continue
            for col, s in cols[j]:
                obj[col] = obj.get(col, 0) + sign * s * c
        m = lcm(1, *(_den(v) for v in obj.values()))
        R = [0] * (ncols + 1)
        for col, v in obj.items():
            R[col] = int(v * m)
        cost = [R]
        for r, b in enumerate(tab.basis):
            f = cost[0][b]
            if f:
                a = tab.A[r][b]
                cost[0] = _reduce([x * a - y * f for x, y in zip(cost[0], tab.A[r])])
        if not tab.run(cost, allowed):
            return LpOutcome(LpStatus.UNBOUNDED)
        status = LpStatus.OPTIMAL
    else:
        status = LpStatus.FEASIBLE

    colval = [Fraction(0)] * ncols
    for r, b in enumerate(tab.basis):
        colval[b] = Fraction(tab.A[r][-1], tab.A[r][b])
    x = []
    for j in range(nvar):
        v = Fraction(offset[j])
        for c, s in cols[j]:
            v += s * colval[c]
        x.append(v)
    if not lp.check(x):
        raise RuntimeError("simplex produced a point that violates the program")
    assignment = dict(zip(lp.names, x))
    objective = None
    if lp.objective is not None:
        objective = sum((Fraction(c) * v for c, v in zip(lp.objective, x)), Fraction(0))
    return LpOutcome(status, assignment, objective)
