"""Binary ILP formulations of the inverse power index problem.

Models are built with exact rational data and every row is scaled to integer
coefficients as it is added, so the LP file written by :func:`export_lp` is
exact and :func:`parse_lp` recovers the same model.  Nothing here solves a
MILP; :func:`run_external` hands a model to a user-configured solver binary
and :func:`bisect_alpha` drives the Banzhaf feasibility model through it.

Variable names: ``x<bits>`` for coalitions (voter 1 is the leftmost bit),
``y<i>_<bits>`` for swings, ``p<i>``, ``delta<i>``, ``s<i>``, ``s``,
``w<i>``, ``q`` and ``z<i>_<j>`` for the aggregated model.
"""

from __future__ import annotations

import enum
import json
import re
import shlex
import subprocess
import tempfile
import threading
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from math import comb, factorial, isqrt, lcm
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import (
    Coalition,
    Game,
    InvalidGameError,
    NotCompleteError,
    SimpleGame,
    WeightedGame,
    bitstring,
    right_shift_successors,
    table_from_flags,
)
from .enumeration import is_weighted
from .inverse import GameClass, TargetDistribution, verify_witness
from .power import IndexKind, ss_coefficients, swing_sets

BINARY, INTEGER, CONTINUOUS = "binary", "integer", "continuous"
LE, GE, EQ = "<=", ">=", "="
ILP_MAX = 12
SIMPLIFIED_MAX = 15


# --- model container -------------------------------------------------------


@dataclass
class Variable:
    name: str
    kind: str = CONTINUOUS
    lower: int | None = 0
    upper: int | None = None


@dataclass
class Constraint:
    name: str
    coeffs: dict[str, int]
    sense: str
    rhs: int


def _integerize(coeffs: Mapping[str, Fraction], rhs: Fraction) -> tuple[dict[str, int], int]:
    scale = lcm(*(Fraction(c).denominator for c in coeffs.values()), Fraction(rhs).denominator)
    return {k: int(Fraction(c) * scale) for k, c in coeffs.items()}, int(Fraction(rhs) * scale)


@dataclass
class IlpModel:
    variables: dict[str, Variable] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    objective: dict[str, int] = field(default_factory=dict)
    objective_constant: Fraction = Fraction(0)
    maximize: bool = False
    metadata: dict[str, str] = field(default_factory=dict)

    def add_variable(self, name: str, kind: str = CONTINUOUS, lower: int | None = 0, upper: int | None = None) -> str:
        if name in self.variables:
            raise ValueError(f"duplicate variable {name}")
        if kind not in (BINARY, INTEGER, CONTINUOUS):
            raise ValueError(f"unknown variable kind {kind!r}")
        if kind == BINARY:
            lower, upper = 0, 1
        self.variables[name] = Variable(name, kind, lower, upper)
        return name

    def add_constraint(self, name: str, coeffs: Mapping[str, Fraction | int], sense: str, rhs: Fraction | int = 0) -> None:
        """Add ``sum coeffs . x  sense  rhs``, scaled by the LCM of its denominators."""
        if sense not in (LE, GE, EQ):
            raise ValueError(f"unknown relation {sense!r}")
        unknown = [v for v in coeffs if v not in self.variables]
        if unknown:
            raise KeyError(f"constraint {name} uses undeclared variables {unknown[:3]}")
        nz = {k: Fraction(c) for k, c in coeffs.items() if c != 0}
        row, r = _integerize(nz, Fraction(rhs))
        self.constraints.append(Constraint(name, row, sense, r))

    def set_objective(self, coeffs: Mapping[str, int], constant: Fraction | int = 0, maximize: bool = False) -> None:
        for k, c in coeffs.items():
            if k not in self.variables:
                raise KeyError(f"objective uses undeclared variable {k}")
            if Fraction(c).denominator != 1:
                raise ValueError("objective coefficients must be integers")
        self.objective = {k: int(c) for k, c in coeffs.items() if c != 0}
        self.objective_constant = Fraction(constant)
        self.maximize = maximize

    @property
    def is_feasibility(self) -> bool:
        return not self.objective

    def objective_value(self, assignment: Mapping[str, Fraction]) -> Fraction:
        return self.objective_constant + sum(
            (c * Fraction(assignment[k]) for k, c in self.objective.items()), Fraction(0)
        )

    def violations(self, assignment: Mapping[str, Fraction]) -> list[str]:
        """Names of the bounds, integrality conditions and rows ``assignment`` breaks (exact)."""
        bad = []
        for v in self.variables.values():
            if v.name not in assignment:
                bad.append(f"{v.name}: unassigned")
                continue
            x = Fraction(assignment[v.name])
            if v.lower is not None and x < v.lower or v.upper is not None and x > v.upper:
                bad.append(f"{v.name}: bound")
            if v.kind != CONTINUOUS and x.denominator != 1:
                bad.append(f"{v.name}: integrality")
        for c in self.constraints:
            lhs = sum((a * Fraction(assignment[k]) for k, a in c.coeffs.items()), Fraction(0))
            ok = lhs <= c.rhs if c.sense == LE else lhs >= c.rhs if c.sense == GE else lhs == c.rhs
            if not ok:
                bad.append(c.name)
        return bad

    def count(self, kind: str | None = None) -> int:
        return sum(1 for v in self.variables.values() if kind is None or v.kind == kind)


# --- model building --------------------------------------------------------


def _coerce_target(n: int, d) -> tuple[Fraction, ...]:
    vals = d.d if isinstance(d, TargetDistribution) else tuple(Fraction(x) for x in d)
    if len(vals) != n:
        raise ValueError(f"target has {len(vals)} entries, expected {n}")
    if any(x < 0 for x in vals) or sum(vals) != 1:
        raise ValueError("target must be non-negative and sum to one")
    return vals


def _check_size(n: int, hi: int) -> None:
    if not 1 <= n <= hi:
        raise ValueError(f"n={n} outside 1..{hi}")


def default_big_m(n: int) -> int:
    """ceil(4n((n+1)/4)^((n+1)/2)) + 1, so that M - 1 bounds a weight sum."""
    # the bound squared is rational; take the integer ceiling of its root
    sq = Fraction(16 * n * n) * Fraction(n + 1, 4) ** (n + 1)
    r = isqrt(sq.numerator // sq.denominator)
    while r * r < sq:
        r += 1
    return r + 1


def _x(n: int, mask: int) -> str:
    return "x" + bitstring(n, mask)


def _y(n: int, i: int, mask: int) -> str:
    return f"y{i}_{bitstring(n, mask)}"


def _base(n: int, label: str, kind: str, **meta) -> IlpModel:
    m = IlpModel()
    m.metadata.update({"model": kind, "label": label, "n": str(n)})
    m.metadata.update({k: str(v) for k, v in meta.items()})
    for mask in range(1 << n):
        m.add_variable(_x(n, mask), BINARY)
    m.add_constraint("empty", {_x(n, 0): 1}, EQ, 0)
    m.add_constraint("grand", {_x(n, (1 << n) - 1): 1}, EQ, 1)
    return m


def _monotonicity(m: IlpModel, n: int, keep: Callable[[int], bool] = lambda u: True) -> None:
    for u in range(1, 1 << n):
        if not keep(u):
            continue
        for i in range(1, n + 1):
            b = 1 << (n - i)
            if u & b:
                m.add_constraint(f"mono_{bitstring(n, u)}_{i}", {_x(n, u): 1, _x(n, u ^ b): -1}, GE, 0)


def _shift_constraints(m: IlpModel, n: int) -> None:
    for v in range(1, 1 << n):
        for u in sorted(right_shift_successors(Coalition(n, v)), reverse=True):
            m.add_constraint(f"shift_{bitstring(n, v)}_{bitstring(n, u.mask)}", {_x(n, v): 1, _x(n, u.mask): -1}, GE, 0)


def _weight_block(m: IlpModel, n: int, big_m: int) -> None:
    for i in range(1, n + 1):
        m.add_variable(f"w{i}", INTEGER, 0, big_m - 1)
    m.add_variable("q", INTEGER, 0, big_m)
    for u in range(1 << n):
        ws = {f"w{i}": 1 for i in range(1, n + 1) if u >> (n - i) & 1}
        win = {"q": 1, _x(n, u): big_m}
        for k in ws:
            win[k] = -1
        # q - (1 - x_U) M - w(U) <= 0
        m.add_constraint(f"bigw_{bitstring(n, u)}", win, LE, big_m)
        # w(U) - x_U M <= q - 1
        m.add_constraint(f"bigl_{bitstring(n, u)}", {**ws, _x(n, u): -big_m, "q": -1}, LE, -1)


def _game_block(m: IlpModel, n: int, game_class: GameClass, shift: bool, big_m: int | None) -> None:
    if game_class is GameClass.SG:
        _monotonicity(m, n)
    elif game_class is GameClass.CSG:
        _shift_constraints(m, n)
    else:
        if shift:
            _shift_constraints(m, n)
        bm = big_m if big_m is not None else default_big_m(n)
        m.metadata["big_m"] = str(bm)
        _weight_block(m, n, bm)


def _swing_terms(n: int, i: int, eliminate_y: bool, m: IlpModel, weight: Callable[[int], int]) -> dict[str, int]:
    """Linear form of sum_U weight(|U|) * y_{i,U}, declaring y variables unless eliminated."""
    b = 1 << (n - i)
    out: dict[str, int] = {}
    for u in range(1 << n):
        if u & b:
            continue
        c = weight(u.bit_count())
        if eliminate_y:
            out[_x(n, u | b)] = out.get(_x(n, u | b), 0) + c
            out[_x(n, u)] = out.get(_x(n, u), 0) - c
        else:
            y = m.add_variable(_y(n, i, u), BINARY)
            m.add_constraint(f"link{i}_{bitstring(n, u)}", {y: 1, _x(n, u | b): -1, _x(n, u): 1}, EQ, 0)
            out[y] = c
    return out


def _target_meta(d: Sequence[Fraction]) -> str:
    return ",".join(str(x) for x in d)


def build_ss_model(
    n: int,
    d,
    game_class: GameClass | str,
    *,
    eliminate_y: bool = False,
    shift_constraints: bool = True,
    big_m: int | None = None,
    label: str = "",
) -> IlpModel:
    """Minimise the l1 distance of the Shapley-Shubik vector to ``d`` over a game class."""
    _check_size(n, ILP_MAX)
    gc = GameClass.parse(game_class)
    d = _coerce_target(n, d)
    m = _base(n, label, "ss", **{"class": gc.value, "target": _target_meta(d), "eliminate_y": int(eliminate_y)})
    _game_block(m, n, gc, shift_constraints, big_m)
    coef = ss_coefficients(n)
    nf = factorial(n)
    for i in range(1, n + 1):
        delta = m.add_variable(f"delta{i}")
        terms = _swing_terms(n, i, eliminate_y, m, lambda j: coef[j])
        if eliminate_y:
            # terms equal n! * p_i
            m.add_constraint(f"devhi{i}", {**terms, delta: -nf}, LE, nf * d[i - 1])
            m.add_constraint(f"devlo{i}", {**terms, delta: nf}, GE, nf * d[i - 1])
        else:
            p = m.add_variable(f"p{i}")
            m.add_constraint(f"power{i}", {p: nf, **{k: -c for k, c in terms.items()}}, EQ, 0)
            m.add_constraint(f"devhi{i}", {p: 1, delta: -1}, LE, d[i - 1])
            m.add_constraint(f"devlo{i}", {p: 1, delta: 1}, GE, d[i - 1])
    m.set_objective({f"delta{i}": 1 for i in range(1, n + 1)})
    return m


def build_ss_model_simplified(n: int, label: str = "") -> IlpModel:
    """SS model for d = (3/4, 1/4, 0, ..., 0) keeping only voters 1 and 2.

    The deviation of voters 3..n sums to 1 - p1 - p2, so the objective is
    delta1 + delta2 + 1 - p1 - p2; the constant is kept in
    ``objective_constant``.
    """
    _check_size(n, SIMPLIFIED_MAX)
    if n < 2:
        raise ValueError("the simplified model needs n >= 2")
    d = (Fraction(3, 4), Fraction(1, 4))
    m = _base(n, label or f"hard_{n}", "ss-simplified", target=_target_meta(d + (Fraction(0),) * (n - 2)))
    top2 = (1 << (n - 1)) | (1 << (n - 2))
    _monotonicity(m, n, lambda u: bool(u & top2))
    coef = ss_coefficients(n)
    nf = factorial(n)
    for i in (1, 2):
        delta = m.add_variable(f"delta{i}")
        p = m.add_variable(f"p{i}")
        terms = _swing_terms(n, i, False, m, lambda j: coef[j])
        m.add_constraint(f"power{i}", {p: nf, **{k: -c for k, c in terms.items()}}, EQ, 0)
        m.add_constraint(f"devhi{i}", {p: 1, delta: -1}, LE, d[i - 1])
        m.add_constraint(f"devlo{i}", {p: 1, delta: 1}, GE, d[i - 1])
    m.set_objective({"delta1": 1, "delta2": 1, "p1": -1, "p2": -1}, constant=1)
    return m


def build_bz_feasibility_model(
    n: int,
    d,
    alpha: Fraction | int | str,
    game_class: GameClass | str,
    *,
    eliminate_y: bool = False,
    shift_constraints: bool = True,
    big_m: int | None = None,
    label: str = "",
) -> IlpModel:
    """Feasible iff some game of the class has Banzhaf l1 deviation at most ``alpha``."""
    _check_size(n, ILP_MAX)
    alpha = Fraction(alpha)
    if not 0 < alpha <= 2:
        raise ValueError("alpha must lie in (0, 2]")
    gc = GameClass.parse(game_class)
    d = _coerce_target(n, d)
    m = _base(
        n, label, "bz",
        **{"class": gc.value, "target": _target_meta(d), "alpha": alpha, "eliminate_y": int(eliminate_y)},
    )
    _game_block(m, n, gc, shift_constraints, big_m)
    total = m.add_variable("s")
    deltas = []
    for i in range(1, n + 1):
        s_i = m.add_variable(f"s{i}")
        deltas.append(m.add_variable(f"delta{i}"))
        terms = _swing_terms(n, i, eliminate_y, m, lambda j: 1)
        m.add_constraint(f"swings{i}", {s_i: 1, **{k: -c for k, c in terms.items()}}, EQ, 0)
    m.add_constraint("total", {total: 1, **{f"s{i}": -1 for i in range(1, n + 1)}}, EQ, 0)
    m.add_constraint("budget", {**{dl: 1 for dl in deltas}, total: -alpha}, LE, 0)
    for i in range(1, n + 1):
        m.add_constraint(f"devhi{i}", {f"s{i}": 1, total: -d[i - 1], f"delta{i}": -1}, LE, 0)
        m.add_constraint(f"devlo{i}", {f"s{i}": 1, total: -d[i - 1], f"delta{i}": 1}, GE, 0)
    return m


def aggregated_slots(n: int) -> list[tuple[int, int]]:
    """(j, upper bound on z_{i,j}) for the size classes merged by symmetry."""
    out = []
    for j in range((n - 1) // 2 + 1):
        if 2 * j == n - 1:
            out.append((j, comb(n - 1, j)))
        else:
            out.append((j, 2 * comb(n - 1, j)))
    return out


def build_aggregated_model(n: int, d, label: str = "") -> IlpModel:
    """Relaxation on swing counts per size class, coupled by sum_i p_i = 1."""
    _check_size(n, ILP_MAX)
    d = _coerce_target(n, d)
    m = IlpModel()
    m.metadata.update({"model": "aggregated", "label": label, "n": str(n), "target": _target_meta(d)})
    coef = ss_coefficients(n)
    nf = factorial(n)
    for i in range(1, n + 1):
        p = m.add_variable(f"p{i}")
        delta = m.add_variable(f"delta{i}")
        row = {p: nf}
        for j, ub in aggregated_slots(n):
            row[m.add_variable(f"z{i}_{j}", INTEGER, 0, ub)] = -coef[j]
        m.add_constraint(f"power{i}", row, EQ, 0)
        m.add_constraint(f"devhi{i}", {p: 1, delta: -1}, LE, d[i - 1])
        m.add_constraint(f"devlo{i}", {p: 1, delta: 1}, GE, d[i - 1])
    m.add_constraint("sum", {f"p{i}": 1 for i in range(1, n + 1)}, EQ, 1)
    m.set_objective({f"delta{i}": 1 for i in range(1, n + 1)})
    return m


# --- games <-> assignments -------------------------------------------------


def model_target(model: IlpModel) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in model.metadata["target"].split(","))


def game_assignment(model: IlpModel, game: Game) -> dict[str, Fraction]:
    """The assignment a model's variables take for ``game`` (deviations set tight)."""
    n = int(model.metadata["n"])
    if game.n != n:
        raise ValueError(f"game has {game.n} voters, model {n}")
    d = model_target(model)
    table = game.table
    sw = swing_sets(n, table)
    coef = ss_coefficients(n)
    nf = factorial(n)
    vals: dict[str, Fraction] = {}
    for mask in range(1 << n):
        vals[_x(n, mask)] = Fraction(table >> mask & 1)
    eta = [s.bit_count() for s in sw]
    total = sum(eta)
    for i in range(1, n + 1):
        by_size = [0] * n
        for u in range(1 << n):
            if u >> (n - i) & 1:
                continue
            hit = sw[i - 1] >> u & 1
            vals[_y(n, i, u)] = Fraction(hit)
            by_size[u.bit_count()] += hit
        p = Fraction(sum(c * z for c, z in zip(coef, by_size)), nf)
        vals[f"p{i}"] = p
        vals[f"s{i}"] = Fraction(eta[i - 1])
        if model.metadata["model"] == "bz":
            vals[f"delta{i}"] = abs(eta[i - 1] - d[i - 1] * total)
        else:
            vals[f"delta{i}"] = abs(p - d[i - 1])
        for j, _ in aggregated_slots(n):
            z = by_size[j] + (by_size[n - 1 - j] if n - 1 - j != j else 0)
            vals[f"z{i}_{j}"] = Fraction(z)
    vals["s"] = Fraction(total)
    if "q" in model.variables:
        wg = game if isinstance(game, WeightedGame) else _weights_of(game)
        if wg is None:
            raise InvalidGameError("game is not weighted")
        bm = int(model.metadata["big_m"])
        if sum(wg.w) > bm - 1:
            raise ValueError(f"weight sum {sum(wg.w)} exceeds big-M - 1 = {bm - 1}")
        vals["q"] = Fraction(wg.q)
        for i, w in enumerate(wg.w, start=1):
            vals[f"w{i}"] = Fraction(w)
    return {k: vals[k] for k in model.variables}


def _weights_of(game: Game) -> WeightedGame | None:
    try:
        c = game.to_simple().to_complete()
    except NotCompleteError:
        # incomplete, or complete with voters out of desirability order
        return None
    return is_weighted(c)


def bz_ratio(assignment: Mapping[str, Fraction]) -> Fraction:
    """sum delta_i / s, the Banzhaf deviation certified by a feasibility assignment."""
    n = sum(1 for k in assignment if re.fullmatch(r"delta\d+", k))
    return sum((Fraction(assignment[f"delta{i}"]) for i in range(1, n + 1)), Fraction(0)) / Fraction(assignment["s"])


def decode_game(model: IlpModel, assignment: Mapping[str, Fraction], tol: float = 1e-6) -> SimpleGame:
    """Read the game off the x variables; monotonicity and weights are re-verified."""
    n = int(model.metadata["n"])
    flags = np.zeros(1 << n, dtype=bool)
    for mask in range(1 << n):
        v = float(assignment.get(_x(n, mask), 0))
        r = round(v)
        if abs(v - r) > tol or r not in (0, 1):
            raise InvalidGameError(f"{_x(n, mask)} = {v} is not binary")
        flags[mask] = bool(r)
    game = SimpleGame(n, table_from_flags(flags))
    if "q" in model.variables and "q" in assignment:
        q = round(float(assignment["q"]))
        w = [round(float(assignment[f"w{i}"])) for i in range(1, n + 1)]
        for mask in range(1 << n):
            wins = sum(w[i - 1] for i in range(1, n + 1) if mask >> (n - i) & 1) >= q
            if wins != flags[mask]:
                raise InvalidGameError(f"weights [{q};{','.join(map(str, w))}] disagree with x at {bitstring(n, mask)}")
    return game


# --- LP file format ----------------------------------------------------------


_SECTIONS = {
    "minimize": "min", "minimum": "min", "min": "min",
    "maximize": "max", "maximum": "max", "max": "max",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "bounds": "bounds", "bound": "bounds",
    "binaries": "bin", "binary": "bin", "bin": "bin",
    "generals": "gen", "general": "gen", "gen": "gen",
    "end": "end",
}
_WRAP = 200


def _expr(coeffs: Mapping[str, int]) -> list[str]:
    out = []
    for k, c in coeffs.items():
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = k if mag == 1 else f"{mag} {k}"
        out.append(f"{sign} {term}")
    if out and out[0].startswith("+ "):
        out[0] = out[0][2:]
    return out


def _wrapped(head: str, parts: list[str]) -> list[str]:
    lines, cur = [], head
    for p in parts:
        if len(cur) + len(p) + 1 > _WRAP and cur.strip():
            lines.append(cur)
            cur = "   "
        cur += " " + p
    lines.append(cur)
    return lines


def format_lp(model: IlpModel) -> str:
    out = []
    for k, v in model.metadata.items():
        out.append(f"\\ {k}: {v}")
    if model.objective_constant:
        out.append(f"\\ objective_constant: {model.objective_constant}")
    out.append("Maximize" if model.maximize else "Minimize")
    if model.objective:
        out.extend(_wrapped(" obj:", _expr(model.objective)))
    else:
        out.append(f" obj: 0 {next(iter(model.variables))}")
    out.append("Subject To")
    for c in model.constraints:
        out.extend(_wrapped(f" {c.name}:", _expr(c.coeffs) + [c.sense, str(c.rhs)]))
    out.append("Bounds")
    for v in model.variables.values():
        if v.kind == BINARY:
            continue
        if v.lower is None and v.upper is None:
            out.append(f" {v.name} free")
        elif v.upper is None:
            out.append(f" {v.name} >= {v.lower}")
        elif v.lower is None:
            out.append(f" -inf <= {v.name} <= {v.upper}")
        else:
            out.append(f" {v.lower} <= {v.name} <= {v.upper}")
    for title, kind in (("Binaries", BINARY), ("Generals", INTEGER)):
        names = [v.name for v in model.variables.values() if v.kind == kind]
        if names:
            out.append(title)
            out.extend(_wrapped("", names))
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp(model: IlpModel, path) -> None:
    Path(path).write_text(format_lp(model))


class LpParseError(ValueError):
    pass


def _num(tok: str) -> Fraction:
    try:
        return Fraction(Decimal(tok))
    except InvalidOperation as exc:
        raise LpParseError(f"bad number {tok!r}") from exc


def _is_num(tok: str) -> bool:
    return bool(re.fullmatch(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?", tok))


def _parse_terms(tokens: list[str]) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    sign, coef = 1, None
    for t in tokens:
        if t == "+":
            continue
        if t == "-":
            sign = -sign
        elif _is_num(t):
            coef = _num(t)
        else:
            out[t] = out.get(t, Fraction(0)) + sign * (coef if coef is not None else 1)
            sign, coef = 1, None
    return out


def _split_tokens(text: str) -> list[str]:
    text = re.sub(r"(<=|>=|=<|=>)", r" \1 ", text)
    text = re.sub(r"(?<![<>=])=(?![<>=])", " = ", text)
    return text.split()


def parse_lp(text: str) -> IlpModel:
    """Inverse of :func:`format_lp` for the LP subset it writes."""
    model = IlpModel()
    section = None
    body: dict[str, list[str]] = {"obj": [], "st": [], "bounds": [], "bin": [], "gen": []}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            key, sep, val = line[1:].strip().partition(":")
            if sep and section is None:
                if key.strip() == "objective_constant":
                    model.objective_constant = Fraction(val.strip())
                else:
                    model.metadata[key.strip()] = val.strip()
            continue
        low = line.lower()
        if low in _SECTIONS:
            section = _SECTIONS[low]
            if section in ("min", "max"):
                model.maximize = section == "max"
                section = "obj"
            if section == "end":
                break
            continue
        if section is None:
            raise LpParseError(f"text outside any section: {line!r}")
        body[section].append(line)

    declared: dict[str, str] = {}
    for name in " ".join(body["bin"]).split():
        declared[name] = BINARY
    for name in " ".join(body["gen"]).split():
        declared[name] = INTEGER

    bounds: dict[str, tuple[Fraction | None, Fraction | None]] = {}
    for line in body["bounds"]:
        toks = _split_tokens(line)
        if len(toks) == 2 and toks[1].lower() == "free":
            bounds[toks[0]] = (None, None)
        elif len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
            lo = None if toks[0].lower() in ("-inf", "-infinity") else _num(toks[0])
            hi = None if toks[4].lower() in ("+inf", "inf", "infinity") else _num(toks[4])
            bounds[toks[2]] = (lo, hi)
        elif len(toks) == 3 and toks[1] in (">=", "<=", "="):
            lo, hi = bounds.get(toks[0], (Fraction(0), None))
            val = _num(toks[2])
            if toks[1] == ">=":
                lo = val
            elif toks[1] == "<=":
                hi = val
            else:
                lo = hi = val
            bounds[toks[0]] = (lo, hi)
        else:
            raise LpParseError(f"unsupported bound line: {line!r}")

    obj_tokens = _split_tokens(" ".join(body["obj"]))
    if obj_tokens and obj_tokens[0].endswith(":"):
        obj_tokens = obj_tokens[1:]
    objective = _parse_terms(obj_tokens)

    rows: list[tuple[str, dict[str, Fraction], str, Fraction]] = []
    toks = _split_tokens(" ".join(body["st"]))
    k = 0
    while k < len(toks):
        if not toks[k].endswith(":"):
            raise LpParseError(f"expected a constraint name at {toks[k]!r}")
        name = toks[k][:-1]
        k += 1
        start = k
        while k < len(toks) and toks[k] not in ("<=", ">=", "=", "=<", "=>"):
            k += 1
        if k + 1 >= len(toks):
            raise LpParseError(f"constraint {name} has no right-hand side")
        sense = {"=<": LE, "=>": GE}.get(toks[k], toks[k])
        rows.append((name, _parse_terms(toks[start:k]), sense, _num(toks[k + 1])))
        k += 2

    # declaration order as the writer emits it: the placeholder objective
    # variable of a feasibility model, then binaries, then the Bounds section
    placeholder = [k for k, v in objective.items() if v == 0]
    binaries = [k for k, kind in declared.items() if kind == BINARY]
    appearing = [name for coeffs in [objective] + [r[1] for r in rows] for name in coeffs]
    order = list(dict.fromkeys(placeholder + binaries + list(bounds) + list(declared) + appearing))
    for name in order:
        kind = declared.get(name, CONTINUOUS)
        lo, hi = bounds.get(name, (Fraction(0), None))
        model.add_variable(name, kind, _int_or_none(lo), _int_or_none(hi))
    for name, coeffs, sense, rhs in rows:
        model.add_constraint(name, coeffs, sense, rhs)
    model.set_objective({k: v for k, v in objective.items() if v != 0}, model.objective_constant, model.maximize)
    return model


def _int_or_none(x: Fraction | None):
    if x is None:
        return None
    return int(x) if x.denominator == 1 else x


def read_lp(path) -> IlpModel:
    return parse_lp(Path(path).read_text())


# --- external solvers ------------------------------------------------------


class ExternalSolverError(RuntimeError):
    """The external solver failed or produced output that cannot be trusted."""


class InconsistentSolverError(ExternalSolverError):
    pass


class ExternalStatus(enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    TIMEOUT = "timeout"


@dataclass
class ExternalResult:
    status: ExternalStatus
    assignment: dict[str, Fraction] | None = None
    value: Fraction | None = None
    log: str = ""


@dataclass(frozen=True)
class SolverAdapter:
    """How to call a MILP solver binary on an LP file.

    ``command`` contains ``{model}`` and ``{solution}``; the solver must write
    one ``name value`` pair per line to the solution file, or print
    ``infeasible_marker`` (to stdout, stderr or the solution file).
    """

    command: str
    solution_regex: str = r"^\s*(\S+)\s+(\S+)\s*$"
    infeasible_marker: str = "INFEASIBLE"
    timeout_s: float = 600.0
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, repr=False)

    def __post_init__(self):
        if "{model}" not in self.command or "{solution}" not in self.command:
            raise ValueError("command must contain {model} and {solution}")
        re.compile(self.solution_regex)

    @classmethod
    def from_dict(cls, cfg: Mapping) -> "SolverAdapter":
        keys = {"command", "solution_regex", "infeasible_marker", "timeout_s"}
        extra = set(cfg) - keys
        if extra:
            raise ValueError(f"unknown adapter keys {sorted(extra)}")
        return cls(**cfg)

    @classmethod
    def load(cls, path) -> "SolverAdapter":
        return cls.from_dict(json.loads(Path(path).read_text()))


def parse_solution(model: IlpModel, text: str, pattern: str, tol: float = 1e-6) -> dict[str, Fraction]:
    rx = re.compile(pattern)
    vals: dict[str, Fraction] = {}
    for line in text.splitlines():
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        mt = rx.match(line)
        if not mt:
            raise ExternalSolverError(f"unparsable solution line {line!r}")
        name, raw = mt.group(1), mt.group(2)
        if name not in model.variables:
            raise ExternalSolverError(f"solution names unknown variable {name!r}")
        try:
            v = Fraction(Decimal(raw))
        except InvalidOperation as exc:
            raise ExternalSolverError(f"bad value {raw!r} for {name}") from exc
        if model.variables[name].kind != CONTINUOUS:
            r = round(v)
            if abs(v - r) > tol:
                raise ExternalSolverError(f"integer variable {name} = {raw}")
            v = Fraction(r)
        vals[name] = v
    # solvers commonly omit zeros
    return {k: vals.get(k, Fraction(0)) for k in model.variables}


def run_external(adapter: SolverAdapter, model: IlpModel, workdir=None) -> ExternalResult:
    """Write ``model``, run the adapter's command and read its answer."""
    with adapter._lock, tempfile.TemporaryDirectory(dir=workdir) as tmp:
        mp = Path(tmp) / "model.lp"
        sp = Path(tmp) / "solution.txt"
        export_lp(model, mp)
        cmd = adapter.command.replace("{model}", shlex.quote(str(mp))).replace("{solution}", shlex.quote(str(sp)))
        try:
            proc = subprocess.run(shlex.split(cmd), capture_output=True, text=True, timeout=adapter.timeout_s)
        except subprocess.TimeoutExpired:
            return ExternalResult(ExternalStatus.TIMEOUT)
        except OSError as exc:
            raise ExternalSolverError(f"cannot run solver: {exc}") from exc
        sol = sp.read_text() if sp.exists() else ""
        log = proc.stdout + proc.stderr
        marker = adapter.infeasible_marker.lower()
        if marker and (marker in log.lower() or marker in sol.lower()):
            return ExternalResult(ExternalStatus.INFEASIBLE, log=log)
        if proc.returncode != 0:
            raise ExternalSolverError(f"solver exited with {proc.returncode}: {log.strip()[-500:]}")
        if not sp.exists():
            raise ExternalSolverError("solver wrote no solution file")
        assign = parse_solution(model, sol, adapter.solution_regex)
    if model.is_feasibility:
        return ExternalResult(ExternalStatus.FEASIBLE, assign, None, log)
    return ExternalResult(ExternalStatus.OPTIMAL, assign, model.objective_value(assign), log)


@dataclass
class BisectionResult:
    deviation: Fraction
    game: SimpleGame
    lower: Fraction
    upper: Fraction
    trace: list[tuple[Fraction, bool]]


def bisect_alpha(
    adapter: SolverAdapter,
    n: int,
    d,
    game_class: GameClass | str,
    granularity: Fraction | None = None,
    **model_opts,
) -> BisectionResult:
    """Minimise the Banzhaf deviation by bisection on alpha over (0, 2].

    Every feasible answer is decoded to a game whose exact deviation is
    recomputed; answers contradicting an earlier one (a game beating an
    alpha reported infeasible) abort with :class:`InconsistentSolverError`.
    """
    target = _coerce_target(n, d)
    gran = Fraction(granularity) if granularity is not None else Fraction(1, n * 2**n) ** 2
    if gran <= 0:
        raise ValueError("granularity must be positive")
    trace: list[tuple[Fraction, bool]] = []
    best: tuple[Fraction, SimpleGame] | None = None
    worst_infeasible = Fraction(0)

    def query(alpha: Fraction) -> bool:
        nonlocal best, worst_infeasible
        model = build_bz_feasibility_model(n, target, alpha, game_class, **model_opts)
        res = run_external(adapter, model)
        if res.status is ExternalStatus.TIMEOUT:
            raise ExternalSolverError(f"solver timed out at alpha={alpha}")
        ok = res.status is ExternalStatus.FEASIBLE
        trace.append((alpha, ok))
        if ok:
            game = decode_game(model, res.assignment)
            dev = verify_witness(game, target, IndexKind.BANZHAF)
            if dev <= worst_infeasible:
                raise InconsistentSolverError(
                    f"game with deviation {dev} found, but alpha={worst_infeasible} was reported infeasible"
                )
            if best is None or dev < best[0]:
                best = (dev, game)
        else:
            worst_infeasible = max(worst_infeasible, alpha)
            if best is not None and best[0] <= alpha:
                raise InconsistentSolverError(
                    f"alpha={alpha} reported infeasible, but a game with deviation {best[0]} is known"
                )
        return ok

    if not query(Fraction(2)):
        raise InconsistentSolverError("alpha=2 reported infeasible; every game meets it")
    lo, hi = Fraction(0), Fraction(2)
    while hi - lo >= gran:
        mid = (lo + hi) / 2
        if query(mid):
            hi = mid
        else:
            lo = mid
    assert best is not None
    return BisectionResult(best[0], best[1], lo, hi, trace)
