"""Command-line interface.

Three subcommands: ``solve`` runs benchmark sweeps and writes solution files
plus a report, ``verify`` re-checks a solution file against the raw
constraints, and ``export`` converts a solution file to CSV or an OBJ scene.
The default output directory comes from the DISPERSE3D_OUT environment
variable. ``solve`` exits non-zero unless every run is feasible.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import VERIFY_TOL, default_output_dir, export, load_solution, run_benchmark, verify
from .geometry import Metric


def _parse_p_list(text: str) -> list[int]:
    """Accept '7', '1..10', or comma lists like '1,3,7'."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"invalid point-count list: {text!r}")
    return out


def _add_solve(sub):
    cmd = sub.add_parser("solve", help="run the solver over one or more instance sizes")
    cmd.add_argument("--container", required=True,
                     help="built-in name (unit_cube, unit_tetrahedron, h_box, star) "
                          "or a container JSON file")
    cmd.add_argument("--p", required=True, type=_parse_p_list,
                     help="point count: int, range like 1..10, or comma list")
    cmd.add_argument("--metric", default="euclidean",
                     choices=[m.value for m in Metric])
    cmd.add_argument("--seed", type=int, default=0)
    cmd.add_argument("--beta", type=int, help="tabu depth override")
    cmd.add_argument("--q", type=int, help="neighborhood width override")
    cmd.add_argument("--iters", type=int, help="global iterations override")
    cmd.add_argument("--k", type=int, help="penalty-ladder rounds override")
    cmd.add_argument("--d-init", type=float, help="initial radius override")
    cmd.add_argument("--rho", type=float, help="initial packing density override")
    cmd.add_argument("--rays", type=int, help="rays per interiority test")
    cmd.add_argument("--epsilon", type=float, help="feasibility tolerance override")
    cmd.add_argument("--out", default=None, help="output directory")


def _add_verify(sub):
    cmd = sub.add_parser("verify", help="re-check a solution file")
    cmd.add_argument("solution", help="solution JSON path")
    cmd.add_argument("--tol", type=float, default=VERIFY_TOL)


def _add_export(sub):
    cmd = sub.add_parser("export", help="convert a solution file")
    cmd.add_argument("solution", help="solution JSON path")
    cmd.add_argument("--format", required=True, choices=["json", "csv", "obj-spheres"])
    cmd.add_argument("--out", default=None, help="output file path")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="disperse3d",
        description="Spread points inside polyhedral containers, maximizing "
                    "their minimum separation and boundary clearance.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_solve(sub)
    _add_verify(sub)
    _add_export(sub)
    args = parser.parse_args(argv)

    if args.command == "solve":
        overrides = {}
        for src, dst in [("beta", "beta"), ("q", "q"), ("iters", "iterations"),
                         ("k", "sumt_rounds"), ("d_init", "d_init"),
                         ("rho", "rho_init"), ("rays", "rays"),
                         ("epsilon", "epsilon")]:
            value = getattr(args, src)
            if value is not None:
                overrides[dst] = value
        out_dir = args.out if args.out is not None else default_output_dir()

        def progress(report):
            row = report.row()
            ref = f" best={row['d_best']} err={row['r_err_percent']}%" if row["d_best"] else ""
            print(f"{row['container']} {row['metric']} p={row['p']}: "
                  f"d={row['d']}{ref} ({row['runtime_seconds']}s)")

        try:
            reports = run_benchmark(args.container, args.p, Metric.from_name(args.metric),
                                    overrides, seed=args.seed, out_dir=out_dir,
                                    progress=progress)
        except Exception as exc:  # surfaced as a clean failure, not a traceback
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {len(reports)} solution(s) to {out_dir}")
        feasible = all(r.solution.energy.total <= r.solution.params.epsilon
                       for r in reports)
        return 0 if feasible else 2

    if args.command == "verify":
        ok, report = verify(args.solution, tol=args.tol)
        print(f"d = {report.d_radius!r}")
        print(f"containment: {'ok' if all(report.inside) else 'VIOLATED'}")
        print(f"min pair margin:     {report.min_pair_margin:+.3e}")
        print(f"min boundary margin: {report.min_boundary_margin:+.3e}")
        for line in report.violations(args.tol):
            print(f"  {line}")
        print("feasible" if ok else "INFEASIBLE")
        return 0 if ok else 2

    if args.command == "export":
        data = load_solution(args.solution)
        out = args.out
        if out is None:
            src = Path(args.solution)
            if args.format == "json":
                out = src.with_name(src.stem + ".export.json")
            else:
                out = src.with_suffix(".csv" if args.format == "csv" else ".obj")
        path = export(data, args.format, out)
        print(f"wrote {path}")
        return 0

    return 1


if __name__ == "__main__":
    raise SystemExit(main())
