"""Command-line entry points: `dgmhd solve` and `dgmhd converge`."""

import argparse
import sys

from .cases import CASES
from .driver import (
    RunConfig,
    convergence_study,
    format_convergence_table,
    load_config,
    merge_config,
    run,
)
from .errors import SolverError

CASE_NAMES = sorted(CASES)


def _parse_snapshots(text: str):
    return tuple(float(part) for part in text.split(",") if part.strip())


def _parse_meshes(text: str):
    return tuple(int(part) for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgmhd",
        description="2D ideal-MHD discontinuous Galerkin solver")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="advance one case and write snapshots")
    solve.add_argument("--case", choices=CASE_NAMES)
    solve.add_argument("--config", help="flat key = value file; flags override it")
    solve.add_argument("--nx", type=int)
    solve.add_argument("--ny", type=int)
    solve.add_argument("--k", type=int, dest="degree", help="polynomial degree (default 2)")
    solve.add_argument("--cfl", type=float)
    solve.add_argument("--t-final", type=float, dest="t_final")
    solve.add_argument("--snapshots", type=_parse_snapshots,
                       help="comma-separated times to write snapshots at")
    solve.add_argument("--format", choices=("csv", "vtk"), dest="out_format")
    solve.add_argument("--out", dest="out_dir", help="output directory (default ./out)")
    solve.add_argument("--no-oe", action="store_true",
                       help="disable the oscillation-eliminating filter")
    solve.add_argument("--no-ldf", action="store_true",
                       help="disable the divergence-free magnetic projection")
    solve.add_argument("--workers", type=int)
    solve.add_argument("--snapshot-points", choices=("centers", "quadrature"),
                       dest="snapshot_points", help="sampling for CSV dumps")

    conv = sub.add_parser("converge", help="mesh-refinement error study")
    conv.add_argument("--case", default="vortex", choices=CASE_NAMES)
    conv.add_argument("--meshes", type=_parse_meshes, default=(16, 32, 64),
                      help="comma-separated mesh sizes, e.g. 16,32,64")
    conv.add_argument("--k", type=int, dest="degree", default=2)
    conv.add_argument("--cfl", type=float, default=0.15)
    conv.add_argument("--t-final", type=float, dest="t_final")
    conv.add_argument("--workers", type=int, default=1)
    return parser


def _solve(args) -> int:
    if args.config:
        config = load_config(args.config)
    else:
        if args.case is None:
            print("error: solve needs --case or --config", file=sys.stderr)
            return 2
        config = RunConfig(case=args.case)
    config = merge_config(
        config,
        case=args.case, nx=args.nx, ny=args.ny, degree=args.degree,
        cfl=args.cfl, t_final=args.t_final, snapshots=args.snapshots,
        out_dir=args.out_dir, out_format=args.out_format,
        workers=args.workers, snapshot_points=args.snapshot_points)
    if args.no_oe:
        config = merge_config(config, oe_enabled=False)
    if args.no_ldf:
        config = merge_config(config, ldf_enabled=False)
    summary = run(config)
    sys.stdout.write(summary.to_text())
    return 0


def _converge(args) -> int:
    report = convergence_study(case_name=args.case, meshes=args.meshes,
                               degree=args.degree, cfl=args.cfl,
                               t_final=args.t_final, workers=args.workers)
    sys.stdout.write(format_convergence_table(report))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _solve(args)
        return _converge(args)
    except SolverError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
