"""Benchmark harness: step counts, depths, storage and CPU-load shares
for the point locators, written as machine-readable CSV rows.

Correctness columns (element changes, depths, storage bytes, fallback and
outside counts) are timing-free and reproduce bit-exactly for a fixed
config and seed; wall-clock columns are informative only. Random
workloads draw from numpy's default PCG64 generator seeded from the
config, so reruns are identical.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .mesh import Triangulation, generate_random_delaunay, read_triangle_mesh
from .quadtree import DEFAULT_Q, QuadtreeLocator, qt_depth
from .sl import VectorField, euler_feet, gaussian_bump, sl_advect
from .structured import StructuredGrid, StructuredLocator
from .walk import (StepStats, WalkLocator, WalkStrategy, mesh_storage_bytes,
                   walk_storage_bytes)

TWO_PI = 2.0 * math.pi

LOCATOR_NAMES = ("quadtree", "walk-a", "walk-b", "walk-c", "structured")
WORKLOADS = ("feet", "random", "fixed-distance")

#: fixed CSV schema; every row carries the full header, unused cells empty
COLUMNS = [
    "kind", "mesh_source", "N", "N_t", "dx",
    "locator", "q", "alpha", "c0", "c1", "workload", "distance",
    "seed", "threads", "rep", "step", "time_steps",
    "mean_changes", "max_changes", "total_changes", "mean_evals",
    "fallbacks", "outside",
    "qt_depth", "qt_nodes", "qt_leaf_indices", "qt_mean_visits",
    "qt_mean_tests",
    "locator_bytes", "mesh_bytes",
    "qt_bytes", "walk_ab_bytes", "walk_c_bytes", "qt_walk_ratio",
    "t_query", "t_locate", "t_interp", "t_total", "locate_fraction",
]


class ConfigError(ValueError):
    """Inconsistent benchmark configuration."""


@dataclass
class BenchConfig:
    """One benchmark run: a mesh source, a locator, a workload.

    Exactly one of ``mesh_file`` / ``courant_m`` / ``random_n`` selects
    the mesh. ``locator`` may be a comma-separated list where several
    locators are compared in one report (the SL profile). The time step
    is ``courant * dx``.
    """

    mesh_file: str | None = None
    courant_m: int | None = None
    random_n: int | None = None
    seed: int = 0
    locator: str = "walk-b"
    q: int = DEFAULT_Q
    c0: float = TWO_PI
    c1: float = TWO_PI
    courant: float = 5.0
    t_final: float = 1.0
    workload: str = "feet"
    distance: float | None = None
    reps: int = 1
    threads: int = 1
    snapshot_every: int | None = None
    at_arrival_time: bool = False

    def locators(self) -> list[str]:
        return [s.strip() for s in self.locator.split(",") if s.strip()]

    def check(self) -> None:
        sources = [s is not None for s in
                   (self.mesh_file, self.courant_m, self.random_n)]
        if sum(sources) != 1:
            raise ConfigError("exactly one mesh source (mesh file, courant "
                              "M, or random N) must be given")
        for name in self.locators():
            if name not in LOCATOR_NAMES:
                raise ConfigError(f"unknown locator {name!r}; choose from "
                                  f"{LOCATOR_NAMES}")
            if name == "structured" and self.courant_m is None:
                raise ConfigError("the structured locator needs a courant "
                                  "mesh (--m)")
        if not self.locators():
            raise ConfigError("no locator given")
        if self.workload not in WORKLOADS:
            raise ConfigError(f"unknown workload {self.workload!r}")
        if self.workload == "fixed-distance" and self.distance is None:
            raise ConfigError("fixed-distance workload needs --distance")
        if self.courant < 0:
            raise ConfigError(f"courant must be >= 0, got {self.courant}")
        if self.reps < 1:
            raise ConfigError("reps must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")


@dataclass
class BenchReport:
    """List of CSV-ready row dicts under the fixed column schema."""

    rows: list = field(default_factory=list)

    def add(self, **cells) -> dict:
        unknown = set(cells) - set(COLUMNS)
        if unknown:
            raise KeyError(f"unknown report columns: {sorted(unknown)}")
        row = {c: cells.get(c, "") for c in COLUMNS}
        self.rows.append(row)
        return row

    def extend(self, other: "BenchReport") -> None:
        self.rows.extend(other.rows)

    def column(self, name, rows=None):
        picked = self.rows if rows is None else rows
        return [r[name] for r in picked]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=COLUMNS)
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: _cell(v) for k, v in row.items()})

    @classmethod
    def read_csv(cls, path) -> "BenchReport":
        report = cls()
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                report.rows.append({c: row.get(c, "") for c in COLUMNS})
        return report


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return value


# ---------------------------------------------------------------------------
# Config resolution
# ---------------------------------------------------------------------------

def resolve_mesh(config: BenchConfig):
    """Build (mesh, grid-or-None, source label) from the config."""
    if config.mesh_file is not None:
        return read_triangle_mesh(config.mesh_file), None, config.mesh_file
    if config.courant_m is not None:
        grid = StructuredGrid.create(config.courant_m)
        return grid.mesh, grid, f"courant-{config.courant_m}"
    mesh = generate_random_delaunay(config.random_n, config.seed)
    return mesh, None, f"random-{config.random_n}"


def make_locator(name: str, mesh: Triangulation, config: BenchConfig,
                 grid: StructuredGrid | None = None):
    """Fresh locator instance (walk contexts are re-seeded per call)."""
    if name == "quadtree":
        return QuadtreeLocator(mesh, config.q)
    if name == "structured":
        if grid is None:
            raise ConfigError("structured locator outside a courant mesh")
        return StructuredLocator(grid)
    parallel = config.threads > 1
    if parallel:
        import numba
        numba.set_num_threads(min(config.threads, numba.config.NUMBA_NUM_THREADS))
    return WalkLocator(mesh, WalkStrategy.coerce(name), seed=config.seed,
                       parallel=parallel)


def combine_stats(parts: list[StepStats]) -> StepStats:
    """Merge per-sweep stats; means stay over in-domain queries."""
    n_inside = sum(p.n_inside for p in parts)
    total = sum(p.total_changes for p in parts)
    return StepStats(
        n_queries=sum(p.n_queries for p in parts),
        n_inside=n_inside,
        n_outside=sum(p.n_outside for p in parts),
        total_changes=total,
        mean_changes=total / n_inside if n_inside else float("nan"),
        max_changes=max((p.max_changes for p in parts), default=0),
        fallbacks=sum(p.fallbacks for p in parts),
    )


def _locator_cells(locator, mesh) -> dict:
    cells = {"locator_bytes": locator.storage_bytes,
             "mesh_bytes": mesh_storage_bytes(mesh)}
    if isinstance(locator, QuadtreeLocator):
        tree = locator.tree
        cells.update(qt_depth=qt_depth(tree), qt_nodes=tree.node_count,
                     qt_leaf_indices=tree.leaf_triangle_index_count)
    return cells


# ---------------------------------------------------------------------------
# Benchmarks
# ---------------------------------------------------------------------------

def bench_locate(config: BenchConfig) -> BenchReport:
    """Step-count/time benchmark of one locator on one workload.

    Workloads: ``random`` locates N uniform points of the mesh bounding
    box; ``fixed-distance`` locates, for every node, a point at the
    configured distance in a seeded random direction; ``feet`` tracks
    the characteristic feet of the rotating field over
    ceil(t_final / dt) steps with the configured locator, dividing time
    totals by the step count.
    """
    config.check()
    if len(config.locators()) != 1:
        raise ConfigError("bench_locate takes a single locator; the SL "
                          "profile compares several")
    _kernels.warm_up()
    mesh, grid, source = resolve_mesh(config)
    report = BenchReport()
    name = config.locators()[0]
    rng = np.random.default_rng(config.seed)
    clock = time.perf_counter

    for rep in range(config.reps):
        locator = make_locator(name, mesh, config, grid)
        is_qt = isinstance(locator, QuadtreeLocator)
        visits_mean = tests_mean = ""
        visits_acc = tests_acc = inside_acc = 0
        if config.workload == "feet":
            field_ = VectorField.rotating(config.c0, config.c1)
            dt = config.courant * mesh.space_scale
            n_steps = max(1, math.ceil(config.t_final / dt - 1e-12))
            parts, t_query, t_locate = [], 0.0, 0.0
            for n in range(n_steps):
                t0 = clock()
                feet = euler_feet(mesh, field_, n, dt, config.at_arrival_time)
                t1 = clock()
                batch = locator.locate(feet)
                t_query += t1 - t0
                t_locate += clock() - t1
                parts.append(batch.stats())
                if is_qt:
                    visits_acc += int(locator.last_visits[batch.inside].sum())
                    tests_acc += int(batch.steps[batch.inside].sum())
                    inside_acc += int(np.count_nonzero(batch.inside))
            stats = combine_stats(parts)
            t_query /= n_steps
            t_locate /= n_steps
        else:
            if config.workload == "random":
                xmin, xmax, ymin, ymax = mesh.bbox
                t0 = clock()
                pts = np.column_stack([
                    rng.uniform(xmin, xmax, mesh.n_vertices),
                    rng.uniform(ymin, ymax, mesh.n_vertices)])
            else:
                d = float(config.distance)
                t0 = clock()
                phi = rng.uniform(0.0, TWO_PI, mesh.n_vertices)
                pts = mesh.vertices + d * np.column_stack([np.cos(phi),
                                                           np.sin(phi)])
            t1 = clock()
            batch = locator.locate(pts)
            t_locate = clock() - t1
            t_query = t1 - t0
            n_steps = 1
            stats = batch.stats()
            if is_qt:
                visits_acc = int(locator.last_visits[batch.inside].sum())
                tests_acc = int(batch.steps[batch.inside].sum())
                inside_acc = int(np.count_nonzero(batch.inside))
        if is_qt and inside_acc:
            visits_mean = visits_acc / inside_acc
            tests_mean = tests_acc / inside_acc

        walk_like = not is_qt and not isinstance(locator, StructuredLocator)
        mean_evals = (1.0 + stats.mean_changes) if walk_like \
            and stats.n_inside else ""
        report.add(
            kind="locate", mesh_source=source, N=mesh.n_vertices,
            N_t=mesh.n_triangles, dx=mesh.space_scale,
            locator=name, q=config.q if is_qt else "",
            alpha=config.courant if config.workload == "feet" else "",
            c0=config.c0 if config.workload == "feet" else "",
            c1=config.c1 if config.workload == "feet" else "",
            workload=config.workload,
            distance=config.distance if config.distance is not None else "",
            seed=config.seed, threads=config.threads, rep=rep,
            time_steps=n_steps,
            mean_changes=stats.mean_changes if walk_like else "",
            max_changes=stats.max_changes if walk_like else "",
            total_changes=stats.total_changes if walk_like else "",
            mean_evals=mean_evals,
            fallbacks=stats.fallbacks, outside=stats.n_outside,
            qt_mean_visits=visits_mean, qt_mean_tests=tests_mean,
            t_query=t_query, t_locate=t_locate,
            t_total=t_query + t_locate,
            locate_fraction=t_locate / (t_query + t_locate)
            if t_query + t_locate > 0 else "",
            **_locator_cells(locator, mesh),
        )
    return report


def bench_storage(config: BenchConfig, sizes) -> BenchReport:
    """Storage accounting over a mesh-size sweep (>= 3 sizes).

    Each row reports, for one mesh, the quadtree bytes, the walk bytes
    for strategies A/B and C, the quadtree/walk-C ratio and the common
    mesh payload, all under the fixed 4/8/8-byte model.
    """
    sizes = list(sizes)
    if len(sizes) < 3:
        raise ConfigError(f"storage sweep needs >= 3 mesh sizes, got {sizes}")
    report = BenchReport()
    for size in sizes:
        if config.courant_m is not None:
            sized = replace(config, courant_m=int(size))
        else:
            sized = replace(config, random_n=int(size), mesh_file=None)
        mesh, _grid, source = resolve_mesh(sized)
        locator = QuadtreeLocator(mesh, config.q)
        qt_bytes = locator.storage_bytes
        ab = walk_storage_bytes(mesh, WalkStrategy.B)
        c = walk_storage_bytes(mesh, WalkStrategy.C)
        report.add(
            kind="storage", mesh_source=source, N=mesh.n_vertices,
            N_t=mesh.n_triangles, dx=mesh.space_scale, q=config.q,
            seed=config.seed,
            qt_bytes=qt_bytes, walk_ab_bytes=ab, walk_c_bytes=c,
            qt_walk_ratio=qt_bytes / c,
            mesh_bytes=mesh_storage_bytes(mesh),
            **{k: v for k, v in _locator_cells(locator, mesh).items()
               if k != "mesh_bytes"},
        )
    return report


def bench_sl_profile(config: BenchConfig) -> BenchReport:
    """Point-location share of the advection load, per locator and rep.

    Runs the full scheme (query build + location + interpolation) with a
    Gaussian initial datum and reports per-phase times and the location
    fraction; one row per (locator, repetition).
    """
    config.check()
    _kernels.warm_up()
    mesh, grid, source = resolve_mesh(config)
    field_ = VectorField.rotating(config.c0, config.c1)
    dt = config.courant * mesh.space_scale
    u0 = gaussian_bump()
    report = BenchReport()
    for name in config.locators():
        for rep in range(config.reps):
            locator = make_locator(name, mesh, config, grid)
            run = sl_advect(mesh, field_, u0, dt, config.t_final, locator,
                            at_arrival_time=config.at_arrival_time)
            stats = combine_stats(run.step_stats)
            prof = run.profile
            is_qt = isinstance(locator, QuadtreeLocator)
            walk_like = not is_qt and not isinstance(locator,
                                                     StructuredLocator)
            report.add(
                kind="sl", mesh_source=source, N=mesh.n_vertices,
                N_t=mesh.n_triangles, dx=mesh.space_scale,
                locator=name, q=config.q if is_qt else "",
                alpha=config.courant, c0=config.c0, c1=config.c1,
                workload="feet", seed=config.seed, threads=config.threads,
                rep=rep, time_steps=prof.n_steps,
                mean_changes=stats.mean_changes if walk_like else "",
                max_changes=stats.max_changes if walk_like else "",
                total_changes=stats.total_changes if walk_like else "",
                mean_evals=(1.0 + stats.mean_changes)
                if walk_like and stats.n_inside else "",
                fallbacks=stats.fallbacks, outside=stats.n_outside,
                t_query=prof.t_query, t_locate=prof.t_locate,
                t_interp=prof.t_interp, t_total=prof.t_total,
                locate_fraction=prof.locate_fraction,
                **_locator_cells(locator, mesh),
            )
    return report
