"""Command-line front end for mesh generation, validation and benchmarks.

Subcommands: ``gen-mesh``, ``validate``, ``bench-locate``,
``bench-storage``, ``sl-run`` and ``report``. Output paths resolve
relative to ``$TRIWALK_OUTDIR`` when that variable is set.
"""

from __future__ import annotations

import argparse
import os
import sys

from .bench import (BenchConfig, BenchReport, ConfigError, bench_locate,
                    bench_sl_profile, bench_storage, make_locator,
                    resolve_mesh)
from .mesh import (MeshError, generate_courant_mesh, generate_random_delaunay,
                   read_triangle_mesh, validate, write_triangle_mesh)
from .quadtree import QuadtreeError

OUTDIR_ENV = "TRIWALK_OUTDIR"


def _outpath(path: str) -> str:
    outdir = os.environ.get(OUTDIR_ENV)
    if outdir and not os.path.isabs(path):
        os.makedirs(outdir, exist_ok=True)
        return os.path.join(outdir, path)
    return path


def _add_mesh_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mesh", help="basename or .node path of a Triangle-format mesh")
    p.add_argument("--m", type=int, help="courant mesh: cells per side")
    p.add_argument("--n-points", type=int, help="random Delaunay mesh: sample count")
    p.add_argument("--seed", type=int, default=0)


def _add_bench_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--locator", default="walk-b",
                   help="quadtree | walk-a | walk-b | walk-c | structured "
                        "(comma-separated list allowed)")
    p.add_argument("--q", type=int, default=7, help="quadtree leaf bound")
    p.add_argument("--c0", type=float, default=BenchConfig.c0,
                   help="spatial frequency of the rotating field")
    p.add_argument("--c1", type=float, default=BenchConfig.c1,
                   help="temporal frequency of the rotating field")
    p.add_argument("--courant", type=float, default=5.0,
                   help="Courant number alpha; dt = alpha * dx")
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--distance", type=float,
                   help="fixed-distance workload: start-to-query distance")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--threads", type=int, default=1,
                   help="opt-in parallel walk for strategies A/B")
    p.add_argument("--csv", help="output CSV path")
    p.add_argument("--snapshot-every", type=int,
                   help="sl-run: solution snapshot cadence in steps")


def _config(args) -> BenchConfig:
    return BenchConfig(
        mesh_file=args.mesh, courant_m=args.m, random_n=args.n_points,
        seed=args.seed, locator=args.locator, q=args.q,
        c0=args.c0, c1=args.c1, courant=args.courant, t_final=args.t_final,
        workload=getattr(args, "workload", "feet"), distance=args.distance,
        reps=args.reps, threads=args.threads,
        snapshot_every=args.snapshot_every,
    )


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="triwalk",
        description="Point location and semi-Lagrangian advection benchmarks "
                    "on 2-D triangular meshes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-mesh", help="generate a mesh as .node/.ele files")
    _add_mesh_flags(p)
    p.add_argument("--csv", required=True, metavar="OUT",
                   help="output basename (writes OUT.node and OUT.ele)")

    p = sub.add_parser("validate", help="check a mesh file's invariants")
    p.add_argument("--mesh", required=True)

    p = sub.add_parser("bench-locate", help="locator step-count benchmark")
    _add_mesh_flags(p)
    _add_bench_flags(p)
    p.add_argument("--workload", default="feet",
                   choices=("feet", "random", "fixed-distance"))

    p = sub.add_parser("bench-storage", help="storage sweep benchmark")
    _add_mesh_flags(p)
    _add_bench_flags(p)
    p.add_argument("--sizes", default="1000,4000,16000",
                   help="comma-separated mesh sizes for the sweep")

    p = sub.add_parser("sl-run", help="run the advection scheme, report "
                                      "per-step stats and snapshots")
    _add_mesh_flags(p)
    _add_bench_flags(p)

    p = sub.add_parser("report", help="merge benchmark CSV files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--csv", required=True)
    return parser


def _cmd_gen_mesh(args) -> int:
    if (args.m is None) == (args.n_points is None):
        raise ConfigError("give exactly one of --m or --n-points")
    if args.m is not None:
        mesh = generate_courant_mesh(args.m)
    else:
        mesh = generate_random_delaunay(args.n_points, args.seed)
    node_path, ele_path = write_triangle_mesh(mesh, _outpath(args.csv))
    print(f"wrote {node_path} and {ele_path}  "
          f"(N={mesh.n_vertices}, N_t={mesh.n_triangles})")
    return 0


def _cmd_validate(args) -> int:
    mesh = read_triangle_mesh(args.mesh)
    report = validate(mesh)
    print(f"{args.mesh}: N={mesh.n_vertices}, N_t={mesh.n_triangles}")
    print(report)
    return 0 if report.ok else 1


def _cmd_bench_locate(args) -> int:
    report = bench_locate(_config(args))
    return _finish(report, args.csv, "bench-locate")


def _cmd_bench_storage(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    report = bench_storage(_config(args), sizes)
    return _finish(report, args.csv, "bench-storage")


def _cmd_sl_run(args) -> int:
    from .sl import export_snapshot_csv, sl_advect, VectorField, gaussian_bump

    config = _config(args)
    config.check()
    names = config.locators()
    if len(names) != 1:
        raise ConfigError("sl-run takes a single locator")
    mesh, grid, source = resolve_mesh(config)
    locator = make_locator(names[0], mesh, config, grid)
    field = VectorField.rotating(config.c0, config.c1)
    dt = config.courant * mesh.space_scale
    run = sl_advect(mesh, field, gaussian_bump(), dt, config.t_final, locator,
                    snapshot_every=config.snapshot_every)

    report = BenchReport()
    for n, stats in enumerate(run.step_stats, start=1):
        report.add(kind="sl-step", mesh_source=source, N=mesh.n_vertices,
                   N_t=mesh.n_triangles, dx=mesh.space_scale,
                   locator=locator.name, alpha=config.courant,
                   c0=config.c0, c1=config.c1, seed=config.seed,
                   step=n, time_steps=run.profile.n_steps,
                   mean_changes=stats.mean_changes,
                   max_changes=stats.max_changes,
                   total_changes=stats.total_changes,
                   fallbacks=stats.fallbacks, outside=stats.n_outside)
    prof = run.profile
    report.add(kind="sl", mesh_source=source, N=mesh.n_vertices,
               N_t=mesh.n_triangles, dx=mesh.space_scale,
               locator=locator.name, alpha=config.courant,
               c0=config.c0, c1=config.c1, seed=config.seed,
               time_steps=prof.n_steps, t_query=prof.t_query,
               t_locate=prof.t_locate, t_interp=prof.t_interp,
               t_total=prof.t_total, locate_fraction=prof.locate_fraction,
               locator_bytes=locator.storage_bytes)

    if args.csv:
        base = _outpath(args.csv)
        if base.endswith(".csv"):
            base = base[:-len(".csv")]
        for state in run.states:
            if config.snapshot_every or state.time_index == prof.n_steps:
                export_snapshot_csv(mesh, state,
                                    f"{base}_snap_{state.time_index:05d}.csv")
    return _finish(report, args.csv, "sl-run")


def _cmd_report(args) -> int:
    merged = BenchReport()
    for path in args.inputs:
        merged.extend(BenchReport.read_csv(path))
    merged.write_csv(_outpath(args.csv))
    print(f"merged {len(args.inputs)} file(s), {len(merged.rows)} rows -> "
          f"{_outpath(args.csv)}")
    return 0


def _finish(report: BenchReport, csv_path, label) -> int:
    if csv_path:
        path = _outpath(csv_path)
        report.write_csv(path)
        print(f"{label}: {len(report.rows)} row(s) -> {path}")
    else:
        for row in report.rows:
            kept = {k: v for k, v in row.items() if v != ""}
            print(kept)
    return 0


_COMMANDS = {
    "gen-mesh": _cmd_gen_mesh,
    "validate": _cmd_validate,
    "bench-locate": _cmd_bench_locate,
    "bench-storage": _cmd_bench_storage,
    "sl-run": _cmd_sl_run,
    "report": _cmd_report,
}


def cli_main(argv) -> int:
    """Parse ``argv`` (no program name) and run; returns the exit code."""
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:  # argparse reports usage errors itself
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, MeshError, QuadtreeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    raise SystemExit(cli_main(sys.argv[1:]))
