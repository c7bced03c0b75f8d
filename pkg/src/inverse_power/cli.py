"""Command-line entry point: ``inverse-power <subcommand> ...``.

Exit codes: 0 success, 1 usage or input error, 2 computation limit exceeded,
3 external solver failure, 4 verification failure.  ``--json`` prints one
JSON object; rationals appear as ``"num/den"`` strings.  Timings go to
stderr so that stdout is reproducible.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from . import analysis, ilp_models
from .core import InvalidGameError, format_game, parse_game
from .enumeration import LimitExceeded, cached_games, count_games, iter_games, write_games
from .ilp_models import ExternalSolverError, ExternalStatus, SolverAdapter
from .instances import TargetParseError, eec_target, eu_target, hard_target, load_target, save_target
from .inverse import GameClass, InverseInstance, aggregated_lower_bound, deviation, solve
from .power import IndexKind, power_vector, render_decimal, render_significant, swings

EXIT_OK, EXIT_USAGE, EXIT_LIMIT, EXIT_SOLVER, EXIT_VERIFY = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _frac(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return _frac(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _dec(x: Fraction) -> str:
    return render_decimal(Fraction(x), 7)


def _fmt(args) -> str:
    return "json" if args.json else args.format


def _emit(args, payload: dict, text: str, rows: list[list] | None = None) -> None:
    fmt = _fmt(args)
    if fmt == "json":
        print(json.dumps(_jsonable(payload), sort_keys=False))
    elif fmt == "csv" and rows is not None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _timing(label: str, t0: float) -> None:
    print(f"{label}: {time.perf_counter() - t0:.2f}s", file=sys.stderr)


# --- shared argument groups ------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--json", action="store_true", help="emit one JSON object")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--cache-dir", default=None, help="reuse enumerated games stored here")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    return p


def _target_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--target", metavar="FILE", help="CSV of rationals or decimals")
    g.add_argument("--hard", type=int, metavar="N", help="(3/4, 1/4, 0, ..., 0) on N voters")
    g.add_argument("--eu", type=int, metavar="N", help="square-root target of the N largest EU states")
    g.add_argument("--eec", action="store_true", help="square-root target of the 1957 EEC")
    p.add_argument("--normalize", action="store_true", help="rescale a target file that does not sum to 1")


def _target(args):
    if args.target:
        return load_target(args.target, args.normalize)
    if args.hard is not None:
        return hard_target(args.hard)
    if args.eu is not None:
        return eu_target(args.eu)
    if args.eec:
        return eec_target()
    return None


def _class_arg(p, default=None) -> None:
    p.add_argument("--class", dest="game_class", choices=("sg", "csg", "wvg"), default=default, required=default is None)


def _index_arg(p, default=None) -> None:
    p.add_argument("--index", choices=("bz", "ss"), default=default, required=default is None)


# --- subcommands -----------------------------------------------------------


def cmd_count(args) -> int:
    t0 = time.perf_counter()
    if args.cache_dir:
        total = len(cached_games(args.game_class, args.n, args.cache_dir))
    else:
        total = count_games(args.game_class, args.n, threads=max(1, args.threads))
    _timing("count", t0)
    _emit(args, {"class": args.game_class, "n": args.n, "count": total}, str(total))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    games = cached_games(args.game_class, args.n, args.cache_dir) if args.cache_dir else iter_games(args.game_class, args.n)
    if args.out:
        write_games(args.out, games, header=f"{args.game_class} n={args.n}")
        _emit(args, {"class": args.game_class, "n": args.n, "count": len(games), "out": args.out}, f"{len(games)} games written to {args.out}")
    elif _fmt(args) == "json":
        _emit(args, {"class": args.game_class, "n": args.n, "count": len(games), "games": [format_game(g) for g in games]}, "")
    else:
        out = sys.stdout
        for g in games:
            out.write(format_game(g) + "\n")
        out.write(f"#count:{len(games)}\n")
    return EXIT_OK


def cmd_power(args) -> int:
    game = parse_game(args.game)
    prof = swings(game)
    bz = power_vector(game, IndexKind.BANZHAF)
    ss = power_vector(game, IndexKind.SHAPLEY_SHUBIK)
    rows = [["voter", "eta", "bz", "ss"]]
    for i in range(game.n):
        rows.append([i + 1, prof.eta[i], _frac(bz[i]), _frac(ss[i])])
    payload = {"game": format_game(game), "eta": list(prof.eta), "bz": list(bz), "ss": list(ss)}
    if args.format == "text" and not args.json:
        args.format = "csv"  # the natural rendering of this table
    _emit(args, payload, "", rows)
    return EXIT_OK


def _games_for(args, inst):
    if args.cache_dir and args.method == "exhaustive":
        return cached_games(inst.game_class.value, inst.n, args.cache_dir)
    return None


def cmd_invert(args) -> int:
    target = _target(args)
    inst = InverseInstance(target, IndexKind.parse(args.index), GameClass.parse(args.game_class))
    t0 = time.perf_counter()
    res = solve(inst, args.method, games=_games_for(args, inst))
    _timing("invert", t0)
    wits = [format_game(g) for g in res.witnesses[: args.max_witnesses]]
    payload = {
        "instance": target.label,
        "index": inst.index.value,
        "class": inst.game_class.value,
        "method": args.method,
        "deviation": res.best_deviation,
        "decimal": _dec(res.best_deviation),
        "optimal_games": res.optimal_count,
        "witnesses": wits,
        "nodes": res.nodes_visited,
        **{k: v for k, v in res.extras.items()},
    }
    if list(target.permutation) != list(range(1, target.n + 1)):
        payload["voter_order"] = list(target.permutation)
    lines = [
        f"instance: {target.label}  index: {inst.index.value}  class: {inst.game_class.value}  method: {args.method}",
        f"deviation: {_frac(res.best_deviation)} ({_dec(res.best_deviation)})",
        f"optimal games: {res.optimal_count}",
    ]
    lines += [f"witness: {w}" for w in wits]
    lines.append(f"nodes: {res.nodes_visited}")
    if "voter_order" in payload:
        lines.append("voter order (sorted target position -> input position): " + ",".join(map(str, target.permutation)))
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _matches(value: Fraction, expected: str) -> bool:
    """Does ``value`` render to ``expected`` at the precision ``expected`` is written in?"""
    e = expected.strip()
    if "/" in e:
        return value == Fraction(e)
    if "e" in e.lower():
        mant = e.lower().split("e")[0].lstrip("+-").replace(".", "").lstrip("0")
        return Decimal(render_significant(value, max(1, len(mant)))) == Decimal(e)
    places = len(e.split(".")[1]) if "." in e else 0
    return Decimal(render_decimal(value, places)) == Decimal(e)


def cmd_verify_witness(args) -> int:
    game = parse_game(args.game)
    target = _target(args)
    original = target.to_original(target.d)
    if game.n != target.n:
        raise UsageError(f"game has {game.n} voters, target {target.n}")
    p = power_vector(game, args.index)
    dev = deviation(p, original)
    payload = {"game": format_game(game), "index": args.index, "power": list(p), "deviation": dev, "decimal": _dec(dev)}
    text = f"deviation: {_frac(dev)} ({_dec(dev)})"
    code = EXIT_OK
    if args.expect is not None:
        ok = _matches(dev, args.expect)
        payload["expected"] = args.expect
        payload["match"] = ok
        text += f"\nexpected {args.expect}: {'match' if ok else 'MISMATCH'}"
        code = EXIT_OK if ok else EXIT_VERIFY
    _emit(args, payload, text)
    return code


def cmd_bound(args) -> int:
    out: dict = {}
    target = _target(args)
    n = target.n if target is not None else args.n
    if n is None and args.eps is None:
        raise UsageError("give --n, a target, or --eps")
    if n is not None:
        out["pigeonhole"] = analysis.pigeonhole_bound(n)
        out["swing_gap"] = analysis.swing_gap_bound(n)
        if n >= 2:
            out["conjectured_bz"] = analysis.conjectured_bz_bound(n)
    if target is not None:
        out["aggregated_ss"] = aggregated_lower_bound(target.n, target)
    if args.eps is not None:
        out["ae_corollary"] = analysis.ae_corollary(Fraction(args.eps))
    text = "\n".join(f"{k}: {_frac(v)} ({_dec(v)})" for k, v in out.items())
    _emit(args, {"n": n, **out}, text)
    return EXIT_OK


def _model_opts(args) -> dict:
    opts = {"eliminate_y": args.eliminate_y, "shift_constraints": not args.no_shift}
    if args.big_m is not None:
        opts["big_m"] = args.big_m
    return opts


def _build_model(args):
    if args.simplified:
        if args.hard is None:
            raise UsageError("--simplified needs --hard N")
        return ilp_models.build_ss_model_simplified(args.hard)
    target = _target(args)
    if args.aggregated:
        return ilp_models.build_aggregated_model(target.n, target, label=target.label)
    if args.index == "ss":
        return ilp_models.build_ss_model(target.n, target, args.game_class, label=target.label, **_model_opts(args))
    if args.alpha is None:
        raise UsageError("the Banzhaf model is a feasibility model; give --alpha")
    return ilp_models.build_bz_feasibility_model(
        target.n, target, Fraction(args.alpha), args.game_class, label=target.label, **_model_opts(args)
    )


def _model_args(p) -> None:
    _target_args(p)
    _index_arg(p, "ss")
    _class_arg(p, "wvg")
    p.add_argument("--alpha", help="deviation budget for the Banzhaf feasibility model")
    p.add_argument("--simplified", action="store_true", help="two-voter SS model for --hard N")
    p.add_argument("--aggregated", action="store_true", help="aggregated swing-count relaxation")
    p.add_argument("--eliminate-y", action="store_true", help="substitute out swing (and SS power) variables")
    p.add_argument("--no-shift", action="store_true", help="omit shift constraints from weighted models")
    p.add_argument("--big-m", type=int, default=None)


def cmd_export_ilp(args) -> int:
    model = _build_model(args)
    text = ilp_models.format_lp(model)
    if args.out:
        Path(args.out).write_text(text)
        _emit(args, {"out": args.out, "variables": len(model.variables), "constraints": len(model.constraints)},
              f"wrote {args.out}: {len(model.variables)} variables, {len(model.constraints)} constraints")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_solve_ext(args) -> int:
    adapter = SolverAdapter.load(args.adapter)
    model = _build_model(args)
    t0 = time.perf_counter()
    res = ilp_models.run_external(adapter, model)
    _timing("solve-ext", t0)
    payload: dict = {"status": res.status.value}
    lines = [f"status: {res.status.value}"]
    if res.status is ExternalStatus.TIMEOUT:
        _emit(args, payload, "\n".join(lines))
        return EXIT_SOLVER
    if res.assignment is not None and not args.aggregated:
        game = ilp_models.decode_game(model, res.assignment)
        d = ilp_models.model_target(model)
        index = "ss" if model.metadata["model"].startswith("ss") else "bz"
        dev = deviation(power_vector(game, index), d)
        payload.update({"game": format_game(game), "deviation": dev, "decimal": _dec(dev)})
        lines += [f"game: {format_game(game)}", f"exact deviation: {_frac(dev)} ({_dec(dev)})"]
    if res.value is not None:
        payload["solver_objective"] = float(res.value)
        lines.append(f"solver objective: {float(res.value):.10g}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_bisect(args) -> int:
    adapter = SolverAdapter.load(args.adapter)
    target = _target(args)
    gran = Fraction(args.granularity) if args.granularity else None
    t0 = time.perf_counter()
    res = ilp_models.bisect_alpha(adapter, target.n, target, args.game_class, gran, **_model_opts(args))
    _timing("bisect", t0)
    payload = {
        "instance": target.label,
        "deviation": res.deviation,
        "decimal": _dec(res.deviation),
        "game": format_game(res.game),
        "interval": [res.lower, res.upper],
        "trace": [{"alpha": a, "feasible": ok} for a, ok in res.trace],
    }
    lines = [f"deviation: {_frac(res.deviation)} ({_dec(res.deviation)})", f"game: {format_game(res.game)}"]
    lines += [f"alpha {_frac(a)}: {'feasible' if ok else 'infeasible'}" for a, ok in res.trace]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_regions(args) -> int:
    t0 = time.perf_counter()
    grid = analysis.region_grid(
        args.n, args.index, args.i, args.j, args.width, args.height, args.radius, args.threshold, args.game_class
    )
    _timing("regions", t0)
    written = []
    if args.out:
        grid.write_pgm(f"{args.out}.pgm")
        grid.write_csv(f"{args.out}.csv")
        written = [f"{args.out}.pgm", f"{args.out}.csv"]
    tally = {c.name.lower(): sum(row.count(c) for row in grid.classes) for c in analysis.CellClass}
    payload = {"n": args.n, "index": args.index, "points": len(grid.points), "cells": tally, "files": written}
    text = f"{len(grid.points)} projected vectors; " + ", ".join(f"{k} {v}" for k, v in tally.items())
    if written:
        text += "\nwrote " + " ".join(written)
    elif _fmt(args) == "text":
        text = grid.to_pgm()
    _emit(args, payload, text)
    return EXIT_OK


def cmd_verify_appendix(args) -> int:
    kind = IndexKind.parse(args.index)
    vecs = analysis.achievable_vectors(args.n, kind)
    try:
        checks = analysis.verify_worst_case_regions(args.n, kind, args.steps, corrected=args.corrected)
    except ValueError:
        checks = []
    lines = [f"n={args.n} {kind.value}: {len(vecs)} achievable vectors (weighted games)"]
    for v in vecs:
        lines.append("  (" + ", ".join(_frac(x) for x in v) + ")")
    ok = True
    report = []
    for c in checks:
        ok &= c.passed
        status = "pass" if c.passed else "FAIL"
        lines.append(f"{c.lemma}: value {_frac(c.value)}, {c.region_points} region samples, {c.grid_points} grid points: {status}")
        lines += [f"  {f}" for f in c.failures[:10]]
        if len(c.failures) > 10:
            lines.append(f"  ... {len(c.failures) - 10} more")
        report.append({"lemma": c.lemma, "value": c.value, "passed": c.passed, "failures": c.failures})
    if not checks:
        lines.append("no worst-case lemma for this case")
    _emit(args, {"n": args.n, "index": kind.value, "achievable": vecs, "lemmas": report, "passed": ok}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_verify_conjectures(args) -> int:
    bad = analysis.verify_conjecture_sequence(args.upto)
    rows = []
    lines = ["m  n        k_m/l_m  decimal"]
    for m in range(1, args.upto + 1):
        s = analysis.conjecture_terms(m)
        rows.append({"m": m, "n": [2 * m - 1, 2 * m] if m > 1 else [2], "k": s.k, "l": s.l, "ratio": s.ratio})
        nr = f"{2 * m - 1},{2 * m}" if m > 1 else "2"
        lines.append(f"{m:<2} {nr:<8} {s.k}/{s.l}  {_dec(s.ratio)}")
    gap = abs(analysis.conjecture_terms(args.upto).ratio - analysis.CONJECTURE_LIMIT)
    lines.append(f"limit 14/37, gap at m={args.upto}: {float(gap):.3e}")
    lines.append("closed form agrees with the recursion" if not bad else "closed form MISMATCH: " + "; ".join(bad))
    lines.append("note: n=5,6 give 15/38 = 0.39474; the form 15/18 seen in some tables is a misprint of it")
    payload = {"terms": rows, "limit": analysis.CONJECTURE_LIMIT, "gap": float(gap), "mismatches": bad}
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if not bad else EXIT_VERIFY


def cmd_instance(args) -> int:
    target = _target(args)
    if args.out:
        save_target(args.out, target)
    vals = target.to_original(target.d)
    rows = [["voter", "target"]] + [[i + 1, _frac(v)] for i, v in enumerate(vals)]
    text = "\n".join(f"{i + 1} {_frac(v)} ({_dec(v)})" for i, v in enumerate(vals))
    _emit(args, {"label": target.label, "n": target.n, "target": list(vals)}, text, rows)
    return EXIT_OK


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = _Parser(prog="inverse-power", description="Exact power indices and the inverse power index problem.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", parents=[common], help="count games of a class")
    _class_arg(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("enumerate", parents=[common], help="list games of a class")
    _class_arg(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("power", parents=[common], help="swings and both power vectors of a game")
    p.add_argument("game", help="[q;w1,...,wn] or a game line (sg:/csg:/wvg:)")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("invert", parents=[common], help="closest game to a target distribution")
    _class_arg(p)
    _index_arg(p)
    _target_args(p)
    p.add_argument("--method", choices=("exhaustive", "bnb"), default="exhaustive")
    p.add_argument("--max-witnesses", type=int, default=64)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("verify-witness", parents=[common], help="exact deviation of a given game")
    p.add_argument("--game", required=True)
    _index_arg(p)
    _target_args(p)
    p.add_argument("--expect", help="published value (fraction or decimal) to compare at its precision")
    p.set_defaults(func=cmd_verify_witness)

    p = sub.add_parser("bound", parents=[common], help="a-priori bounds")
    _target_args(p, required=False)
    p.add_argument("--n", type=int)
    p.add_argument("--eps", help="Banzhaf mass beyond voter 2, for the corollary bound")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("export-ilp", parents=[common], help="write an ILP model in LP format")
    _model_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_ilp)

    p = sub.add_parser("solve-ext", parents=[common], help="solve a model with an external MILP solver")
    _model_args(p)
    p.add_argument("--adapter", required=True, help="adapter JSON file")
    p.set_defaults(func=cmd_solve_ext)

    p = sub.add_parser("bisect", parents=[common], help="Banzhaf optimum by bisection on alpha")
    _target_args(p)
    _class_arg(p, "wvg")
    p.add_argument("--adapter", required=True)
    p.add_argument("--granularity")
    p.add_argument("--eliminate-y", action="store_true")
    p.add_argument("--no-shift", action="store_true")
    p.add_argument("--big-m", type=int, default=None)
    p.set_defaults(func=cmd_bisect)

    p = sub.add_parser("regions", parents=[common], help="grid of projected achievable vectors")
    p.add_argument("--n", type=int, required=True)
    _index_arg(p)
    _class_arg(p, "wvg")
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--j", type=int, default=2)
    p.add_argument("--width", type=int, default=200)
    p.add_argument("--height", type=int, default=100)
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--threshold", type=int, default=8)
    p.add_argument("--out", help="path prefix for .pgm and .csv")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("verify-appendix", parents=[common], help="achievable vectors and worst-case regions")
    p.add_argument("--n", type=int, required=True)
    _index_arg(p)
    p.add_argument("--steps", type=int, default=60)
    p.add_argument("--corrected", action="store_true", help="check the enlarged Banzhaf regions")
    p.set_defaults(func=cmd_verify_appendix)

    p = sub.add_parser("verify-conjectures", parents=[common], help="worst-case sequence report")
    p.add_argument("--upto", type=int, default=30)
    p.set_defaults(func=cmd_verify_conjectures)

    p = sub.add_parser("instance", parents=[common], help="print or save a built-in target")
    _target_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_instance)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except LimitExceeded as exc:
        print(f"limit exceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ExternalSolverError as exc:
        print(f"external solver: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (UsageError, TargetParseError, InvalidGameError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
