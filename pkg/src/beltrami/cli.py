"""Command-line front end: ``beltrami {list,sample,figure,verify,trace}``.

Exit codes: 0 success, 1 a check failed, 2 usage or I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .calculus import StencilConfig
from .catalog import RECIPES, build_case, list_recipes
from .errors import BeltramiError
from .figures import FIGURES, figure_mesh
from .flow import pick_seed, trace_field_line, trace_to_csv
from .grids import parse_bounds, sample_grid
from .io import csv_table, points_csv, quad_mesh_vtk, structured_grid_vtk
from .verify import VerifyConfig, exit_code, report_json, run_verify

KINDS = ("beltrami", "generalized", "mhd", "euler")


class UsageError(Exception):
    pass


def _common(suppress: bool) -> argparse.ArgumentParser:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--h", type=float, default=d(1e-4), help="finite-difference step")
    p.add_argument("--tol", type=float, default=d(1e-6), help="residual tolerance")
    p.add_argument("--seed", type=int, default=d(0), help="low-discrepancy sampler seed")
    p.add_argument("--out", default=d(None), help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "vtk", "json"), default=d(None),
                   help="output format")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beltrami", parents=[_common(False)],
                                     description="Explicit Beltrami, MHD and Euler fields.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(True)

    p = sub.add_parser("list", parents=[common], help="list catalog recipes")
    p.add_argument("--kind", choices=KINDS)

    p = sub.add_parser("sample", parents=[common], help="sample a field on a grid")
    p.add_argument("--case", required=True)
    p.add_argument("--grid", default="16", help="N or nx,ny,nz")
    p.add_argument("--bounds", help="x0,x1,y0,y1,z0,z1 (Cartesian)")

    p = sub.add_parser("figure", parents=[common], help="emit a figure surface mesh")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--n", type=int, default=48, help="mesh resolution")
    p.add_argument("--strict", action="store_true",
                   help="fail instead of clipping out-of-range parameters")

    p = sub.add_parser("verify", parents=[common], help="run verification suites")
    p.add_argument("--case", action="append", default=None,
                   help="case id or 'all' (repeatable)")
    p.add_argument("--richardson", action="store_true", help="estimate convergence order")
    p.add_argument("--n-points", type=int, default=1000)

    p = sub.add_parser("trace", parents=[common], help="trace a field line")
    p.add_argument("--case", required=True)
    p.add_argument("--start", help="x,y,z seed point (default: picked in the domain)")
    p.add_argument("--ds", type=float, default=1e-2)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--invariants", help="comma-separated invariant names (default all)")
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--stay-in-box", action="store_true")
    return parser


def _command_string(argv) -> str:
    """The invocation without ``--out``, so reports do not depend on where they go."""
    out, skip = ["beltrami"], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--out":
            skip = True
            continue
        if a.startswith("--out="):
            continue
        out.append(a)
    return " ".join(out)


def _emit(text: str, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e}") from None


def _field(case_id):
    if case_id not in RECIPES:
        raise UsageError(f"unknown case {case_id!r}; see 'beltrami list'")
    return build_case(case_id)


def cmd_list(args) -> int:
    rows = [(r.case_id, r.kind, r.chart.name, r.description) for r in list_recipes(args.kind)]
    fmt = args.format or "text"
    if fmt == "json":
        text = json.dumps([dict(zip(("id", "kind", "chart", "anchor"), r)) for r in rows],
                          indent=2) + "\n"
    elif fmt == "csv":
        import csv
        import io
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "kind", "chart", "anchor"])
        w.writerows(rows)
        text = buf.getvalue()
    elif fmt == "vtk":
        raise UsageError("list has no vtk form")
    else:
        wid = max(len(r[0]) for r in rows)
        text = "".join(f"{a:<{wid}}  {b:<11}  {c:<11}  {d}\n" for a, b, c, d in rows)
    _emit(text, args.out)
    return 0


def cmd_sample(args) -> int:
    f = _field(args.case)
    try:
        bounds = parse_bounds(args.bounds) if args.bounds else None
    except ValueError as e:
        raise UsageError(str(e)) from None
    P, W = sample_grid(f, args.grid, bounds)
    fmt = args.format or "csv"
    if fmt == "csv":
        text = points_csv(P, W)
    elif fmt == "vtk":
        text = structured_grid_vtk(P, W, title=f"{args.case} w on a Cartesian grid")
    else:
        raise UsageError("sample writes csv or vtk")
    _emit(text, args.out)
    return 0


def cmd_figure(args) -> int:
    m = figure_mesh(args.figure, n=args.n, strict=args.strict)
    fmt = args.format or "vtk"
    if fmt == "vtk":
        text = quad_mesh_vtk(m.points, m.quads, m.vectors,
                            title=f"{m.figure} {m.case_id} {' '.join(m.surfaces)}")
    elif fmt == "csv":
        p, w = m.points, m.vectors
        text = csv_table({"x": p[:, 0], "y": p[:, 1], "z": p[:, 2], "wx": w[:, 0],
                          "wy": w[:, 1], "wz": w[:, 2], "surface": m.surface_ids})
    else:
        doc = {"figure": m.figure, "case_id": m.case_id, "surfaces": list(m.surfaces),
               "n_points": len(m.points), "n_quads": len(m.quads),
               "clipped": [vars(c) for c in m.clipped]}
        text = json.dumps(doc, indent=2) + "\n"
    _emit(text, args.out)
    if m.clipped:
        print(f"{m.figure}: clipped {len(m.clipped)} parameter runs outside the cleared "
              "region", file=sys.stderr)
    return 0


def cmd_verify(args, argv) -> int:
    if args.format not in (None, "json"):
        raise UsageError("verify writes json")
    cfg = StencilConfig(h=args.h, richardson=args.richardson, n_points=args.n_points,
                        seed=args.seed)
    vc = VerifyConfig(stencil=cfg, tol=args.tol)
    try:
        doc, reports = run_verify(args.case or ["all"], vc, command=_command_string(argv))
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    _emit(report_json(doc), args.out)
    bad = [r for r in reports if not r.ok]
    print(f"{len(reports) - len(bad)}/{len(reports)} checks as expected", file=sys.stderr)
    for r in bad:
        print(f"  {r.case_id} {r.check_name}: {r.max_residual:.3e} (tol {r.tolerance:g})",
              file=sys.stderr)
    return exit_code(reports)


def _parse_point(text):
    try:
        v = [float(t) for t in text.split(",")]
    except ValueError:
        v = []
    if len(v) != 3:
        raise UsageError(f"expected x,y,z, got {text!r}")
    return np.array(v)


def cmd_trace(args) -> int:
    f = _field(args.case)
    if args.format not in (None, "csv"):
        raise UsageError("trace writes csv")
    start = _parse_point(args.start) if args.start else pick_seed(f, seed=args.seed)
    names = list(f.invariants) if args.invariants is None else \
        [s for s in args.invariants.split(",") if s]
    missing = [n for n in names if n not in f.invariants]
    if missing:
        raise UsageError(f"{args.case} has no invariant(s) {', '.join(missing)}; "
                         f"available: {', '.join(f.invariants)}")
    tr = trace_field_line(f, start, args.ds, args.steps, normalize=not args.no_normalize,
                          stay_in_box=args.stay_in_box)
    _emit(trace_to_csv(tr, {n: f.invariants[n] for n in names}), args.out)
    if not tr.complete:
        print(f"trace stopped after {tr.n_steps} steps: {tr.status}: {tr.message}",
              file=sys.stderr)
    return 0


_VECTOR_FLAGS = ("--bounds", "--start")


def _join_vector_values(argv):
    """Glue ``--bounds -1,1,...`` into ``--bounds=-1,1,...``; argparse would
    otherwise read the negative list as a flag."""
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VECTOR_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and "," in argv[i + 1]:
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def main(argv=None) -> int:
    argv = _join_vector_values(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if args.command == "list":
            return cmd_list(args)
        if args.command == "sample":
            return cmd_sample(args)
        if args.command == "figure":
            return cmd_figure(args)
        if args.command == "verify":
            return cmd_verify(args, argv)
        return cmd_trace(args)
    except (UsageError, BeltramiError, ValueError) as e:
        print(f"beltrami {args.command}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
