"""Command-line front end.

Subcommands: ``eval``, ``slice``, ``boundary``, ``faces``, ``triple`` and
``verify``.  Exit codes: 0 ok, 1 verification failure, 2 domain error,
3 I/O error, 4 root-finding or search failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

from . import boundaries, correlations, diagram, verify
from .boundaries import BoundaryKind
from .errors import (BracketError, ConvergenceError, DeficitAtlasError, DomainError,
                     EmptyCurve, IoError, NoInteriorMinimum, NotFound)
from .state import XxzState

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def finite_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def fixed_axis(text):
    axis, sep, value = text.partition("=")
    axis = axis.strip()
    if not sep or axis not in ("s1", "c1"):
        raise argparse.ArgumentTypeError(f"expected s1=<value> or c1=<value>, got {text!r}")
    return axis, finite_float(value)


def _scale(units):
    return math.log(2.0) if units == "bits" else 1.0


def _num(x):
    # 12 significant digits survive a JSON round trip unchanged
    return None if x is None else float(f"{x:.12g}")


def atomic_write(path, text):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands

def run_eval(args, out):
    x = XxzState(args.s1, args.c1, args.c3)
    scale = _scale(args.units)
    d = correlations.deficit(x)
    q = correlations.discord(x)
    zero, half, inner = d.branch_values
    report = {
        "s1": x.s1, "c1": x.c1, "c3": x.c3,
        "units": args.units,
        "deficit": _num(d.value / scale),
        "phase": d.phase.code,
        "theta_opt": _num(d.theta_opt),
        "branches": {
            "zero": _num(zero / scale),
            "pi2": _num(half / scale),
            "theta": None if inner is None else _num(inner / scale),
        },
        "discord": _num(q.value / scale),
        "discord_phase": q.phase.code,
        "discord_theta_opt": _num(q.theta_opt),
    }
    if args.json:
        out.write(json.dumps(report) + "\n")
        return EXIT_OK
    u = args.units
    out.write(f"state            s1={x.s1:.12g} c1={x.c1:.12g} c3={x.c3:.12g}\n")
    out.write(f"deficit          {report['deficit']:.12g} {u}\n")
    out.write(f"phase            {report['phase']}\n")
    out.write(f"theta_opt        {report['theta_opt']:.12g} rad\n")
    out.write(f"branch 0         {report['branches']['zero']:.12g} {u}\n")
    out.write(f"branch pi/2      {report['branches']['pi2']:.12g} {u}\n")
    theta = report["branches"]["theta"]
    out.write(f"branch theta     {'none' if theta is None else f'{theta:.12g} {u}'}\n")
    out.write(f"discord          {report['discord']:.12g} {u}\n")
    out.write(f"discord phase    {report['discord_phase']}\n")
    out.write(f"discord theta    {report['discord_theta_opt']:.12g} rad\n")
    return EXIT_OK


def _curve_summary(curve):
    return {
        "kind": curve.kind.value,
        "face": curve.face,
        "points": len(curve),
        "start": [_num(v) for v in curve.points[0]],
        "end": [_num(v) for v in curve.points[-1]],
        "start_flag": curve.start_flag,
        "end_flag": curve.end_flag,
    }


def run_slice(args, out):
    if not -1.0 < args.c3 < 1.0:
        raise DomainError(f"slice height c3={args.c3} outside (-1, 1)", constraint="-1 < c3 < 1")
    diag = diagram.classify_grid(args.c3, args.res, curves=not args.no_curves, step=args.step)
    summary = {
        "c3": diag.c3,
        "resolution": diag.resolution,
        "areas": {code: {k: _num(v) for k, v in a.items()} for code, a in diag.areas.items()},
        "curves": [_curve_summary(c) for c in diag.curves],
    }
    if args.integrate:
        segment, fraction = diagram.theta_region_area(args.c3)
        summary["theta_segment"] = {"absolute": _num(segment), "fraction": _num(fraction)}
    prefix = str(args.out)
    atomic_write(prefix + ".csv", diagram.render_csv(diag))
    atomic_write(prefix + ".svg", diagram.render_svg(diag))
    atomic_write(prefix + ".areas.json", json.dumps(summary, indent=2) + "\n")
    if args.json:
        out.write(json.dumps(summary) + "\n")
    else:
        out.write(f"slice c3={diag.c3:g} resolution={diag.resolution}\n")
        for code, a in diag.areas.items():
            out.write(f"  phase {code:<6} area {a['absolute']:.6f}  fraction {a['fraction']:.6f}\n")
        for c in summary["curves"]:
            out.write(f"  curve {c['kind']:<10} {c['points']} points, ends {c['start_flag']}/{c['end_flag']}\n")
        out.write(f"wrote {prefix}.csv, {prefix}.svg, {prefix}.areas.json\n")
    return EXIT_OK


def run_boundary(args, out):
    kind = BoundaryKind(args.kind)
    root = boundaries.solve_boundary(kind, args.c3, args.fix, args.lo, args.hi)
    axis, value = args.fix
    x = XxzState(value, root, args.c3) if axis == "s1" else XxzState(root, value, args.c3)
    res = boundaries.residual(kind, x)
    free = "c1" if axis == "s1" else "s1"
    if args.json:
        out.write(json.dumps({"kind": kind.value, "c3": args.c3, axis: value,
                              free: _num(root), "residual": res}) + "\n")
    else:
        out.write(f"{kind.value} boundary at c3={args.c3:g}, {axis}={value:g}: "
                  f"{free} = {root:.12g} (residual {res:.3e})\n")
    return EXIT_OK


def run_faces(args, out):
    faces = boundaries.trace_faces(args.step)
    marks = {k: [_num(v) for v in p] for k, p in faces.landmarks.items()}
    curves = [_curve_summary(c) for c in faces.curves]
    if args.json:
        out.write(json.dumps({"landmarks": marks, "curves": curves}) + "\n")
        return EXIT_OK
    for name, (s1, c1, c3) in marks.items():
        out.write(f"landmark {name}: s1={s1:.9g} c1={c1:.9g} c3={c3:.9g}\n")
    for c in curves:
        out.write(f"{c['face']:<5} face {c['kind']:<10} {c['points']} points, "
                  f"c3 from {c['start'][2]:.6g} to {c['end'][2]:.6g}\n")
    return EXIT_OK


def run_triple(args, out):
    tp = boundaries.find_triple_point(args.c3, args.step)
    scale = _scale(args.units)
    report = {"s1": _num(tp.s1), "c1": _num(tp.c1), "c3": tp.c3, "units": args.units,
              "zero": _num(tp.zero_branch / scale), "pi2": _num(tp.pi_half_branch / scale),
              "theta": _num(tp.interior_branch / scale)}
    if args.json:
        out.write(json.dumps(report) + "\n")
    else:
        out.write(f"triple point at c3={tp.c3:g}: s1={tp.s1:.9g} c1={tp.c1:.9g}\n")
        out.write(f"  branches 0={report['zero']:.12g} pi/2={report['pi2']:.12g} "
                  f"theta={report['theta']:.12g} {args.units}\n")
    return EXIT_OK


def run_verify(args, out):
    results = verify.run_all()
    if args.json:
        out.write(json.dumps([r.as_dict() for r in results], default=str) + "\n")
    else:
        for r in results:
            out.write(verify.format_row(r) + "\n")
        n_pass = sum(r.passed for r in results)
        out.write(f"{n_pass}/{len(results)} criteria passed\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--units", choices=("nats", "bits"), default="nats",
                        help="entropy units (default: nats)")
    common.add_argument("--json", action="store_true", help="emit machine-readable JSON")

    parser = argparse.ArgumentParser(
        prog="deficit-atlas",
        description="One-way quantum deficit and discord of symmetric XXZ two-qubit states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate one state")
    for name in ("s1", "c1", "c3"):
        p.add_argument(f"--{name}", type=finite_float, required=True)
    p.set_defaults(func=run_eval)

    p = sub.add_parser("slice", parents=[common], help="phase diagram of a c3 cross-section")
    p.add_argument("--c3", type=finite_float, required=True)
    p.add_argument("--res", type=int, default=256, help="grid cells per axis")
    p.add_argument("--out", required=True, help="output path prefix")
    p.add_argument("--step", type=finite_float, default=boundaries.DEFAULT_STEP,
                   help="curve tracing step")
    p.add_argument("--no-curves", action="store_true", help="skip boundary tracing")
    p.add_argument("--integrate", action="store_true",
                   help="also integrate the Theta segment area precisely")
    p.set_defaults(func=run_slice)

    p = sub.add_parser("boundary", parents=[common], help="bisect one boundary condition")
    p.add_argument("--kind", choices=[k.value for k in BoundaryKind], required=True)
    p.add_argument("--c3", type=finite_float, required=True)
    p.add_argument("--fix", type=fixed_axis, required=True, help="held coordinate, e.g. c1=0.45")
    p.add_argument("--lo", type=finite_float, required=True)
    p.add_argument("--hi", type=finite_float, required=True)
    p.set_defaults(func=run_boundary)

    p = sub.add_parser("faces", parents=[common], help="boundaries on the tetrahedron faces")
    p.add_argument("--step", type=finite_float, default=boundaries.DEFAULT_STEP)
    p.set_defaults(func=run_faces)

    p = sub.add_parser("triple", parents=[common], help="locate the triple point of a slice")
    p.add_argument("--c3", type=finite_float, required=True)
    p.add_argument("--step", type=finite_float, default=boundaries.DEFAULT_STEP)
    p.set_defaults(func=run_triple)

    p = sub.add_parser("verify", parents=[common], help="run the verification suite")
    p.set_defaults(func=run_verify)
    return parser


def _bracket_diagnostics(exc):
    sign = lambda v: "nan" if not math.isfinite(v) else ("+" if v > 0 else "-" if v < 0 else "0")
    return (f"  u        residual      sign\n"
            f"  {exc.lo:<8.6g} {exc.f_lo:<13.6g} {sign(exc.f_lo)}\n"
            f"  {exc.hi:<8.6g} {exc.f_hi:<13.6g} {sign(exc.f_hi)}\n")


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except DomainError as exc:
        constraint = getattr(exc, "constraint", None)
        err.write(f"domain error: {exc}" + (f" [{constraint}]" if constraint else "") + "\n")
        return EXIT_DOMAIN
    except IoError as exc:
        err.write(f"i/o error: {exc}\n")
        return EXIT_IO
    except BracketError as exc:
        err.write(f"bracket error: {exc}\n" + _bracket_diagnostics(exc))
        return EXIT_NUMERIC
    except (ConvergenceError, NoInteriorMinimum, NotFound, EmptyCurve) as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        # invalid parameter combinations outside the state domain (step, resolution)
        err.write(f"invalid argument: {exc}\n")
        return EXIT_DOMAIN
    except DeficitAtlasError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
