"""Barycentric-walk point location with characteristic-aware starts.

The walk repeatedly computes barycentric coordinates of the query in the
current triangle and, while some coordinate is negative, moves to the
neighbor opposite the most-negative one. On top of the plain walk this
module implements the three initialization strategies for locating the
feet of characteristics:

* ``A`` — start from a fixed (randomly chosen) triangle incident to the
  node the characteristic originates from,
* ``B`` — start from the triangle found for the same node at the previous
  time level,
* ``C`` — visit nodes along a spanning tree of the grid and start from
  the triangle just found for the parent node.

Each element change costs O(1); the walk length is proportional to the
start-to-query distance measured in mesh cells, which is what the
strategies keep O(1) per time step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import WALK_TOL
from .mesh import (MeshError, NO_NEIGHBOR, Triangulation,
                   assign_initial_triangles, build_spanning_tree)

#: element-change cap per walk before the exhaustive-scan fallback
STEP_CAP_FACTOR = 4


class Status(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"


class WalkStrategy(enum.Enum):
    """Start-triangle policy; fix one for a whole multi-step run."""

    A = "a"
    B = "b"
    C = "c"

    @classmethod
    def coerce(cls, value) -> "WalkStrategy":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower().removeprefix("walk-"))


@dataclass
class LocationResult:
    """Single located point: enclosing triangle plus barycentric triple.

    ``steps`` counts element changes; for INSIDE results all coordinates
    are >= -1e-12. For OUTSIDE results the fields describe the boundary
    triangle where the walk left the mesh.
    """

    triangle: int
    coords: np.ndarray
    steps: int
    status: Status
    fallback: bool = False


@dataclass
class StepStats:
    """Element-change statistics of one location sweep.

    Means/maxima are over in-domain queries only; out-of-domain queries
    are counted in ``n_outside`` and excluded, matching how the
    benchmarks discard nodes whose characteristic leaves the domain.
    """

    n_queries: int
    n_inside: int
    n_outside: int
    total_changes: int
    mean_changes: float
    max_changes: int
    fallbacks: int

    @classmethod
    def from_arrays(cls, steps, inside, fallback) -> "StepStats":
        n = int(steps.shape[0])
        n_in = int(np.count_nonzero(inside))
        sin = steps[inside]
        return cls(
            n_queries=n,
            n_inside=n_in,
            n_outside=n - n_in,
            total_changes=int(sin.sum()) if n_in else 0,
            mean_changes=float(sin.mean()) if n_in else float("nan"),
            max_changes=int(sin.max()) if n_in else 0,
            fallbacks=int(np.count_nonzero(fallback)),
        )


@dataclass
class BatchLocations:
    """Struct-of-arrays result of locating many points at once."""

    triangles: np.ndarray   # (n,) int32, -1 when no triangle was found
    coords: np.ndarray      # (n, 3) float64
    steps: np.ndarray       # (n,) int32 element changes (walk) or tests
    inside: np.ndarray      # (n,) bool
    fallback: np.ndarray    # (n,) bool

    def __len__(self):
        return self.triangles.shape[0]

    def __getitem__(self, i) -> LocationResult:
        return LocationResult(
            triangle=int(self.triangles[i]),
            coords=self.coords[i].copy(),
            steps=int(self.steps[i]),
            status=Status.INSIDE if self.inside[i] else Status.OUTSIDE,
            fallback=bool(self.fallback[i]),
        )

    def stats(self) -> StepStats:
        return StepStats.from_arrays(self.steps, self.inside, self.fallback)


@dataclass
class WalkContext:
    """Mutable per-node state of the strategy walks.

    ``initial_triangles`` is the start-triangle list (one entry per node,
    incident to that node at construction time); strategies B and C
    overwrite it as the run progresses. ``parents``/``order`` hold the
    spanning tree, present whenever strategy C is intended.
    """

    initial_triangles: np.ndarray
    parents: np.ndarray | None = None
    order: np.ndarray | None = None

    @classmethod
    def create(cls, mesh: Triangulation, seed: int = 0,
               with_tree: bool = True) -> "WalkContext":
        t0 = assign_initial_triangles(mesh, seed)
        if with_tree:
            parents, order = build_spanning_tree(mesh)
            return cls(t0, parents, order)
        return cls(t0)

    def copy(self) -> "WalkContext":
        return WalkContext(
            self.initial_triangles.copy(),
            None if self.parents is None else self.parents.copy(),
            None if self.order is None else self.order.copy(),
        )


def _step_cap(mesh: Triangulation) -> int:
    return STEP_CAP_FACTOR * mesh.n_triangles


def walk_from(mesh: Triangulation, start: int, p) -> LocationResult:
    """Locate point ``p`` by walking from triangle ``start``.

    Pure-Python reference of the compiled batch kernel: stop as soon as
    min(theta) >= -1e-12 (INSIDE); otherwise move to the neighbor
    opposite the most-negative coordinate (ties to the lowest vertex
    position); a boundary sentinel on that edge means the point left the
    mesh (OUTSIDE). After 4*N_t element changes an exhaustive scan over
    all triangles answers instead, flagged in ``fallback``.
    """
    a1, b1, a2, b2, x3, y3, den = mesh.bary_coefficients
    nb = mesh.neighbors
    px, py = float(p[0]), float(p[1])
    cap = _step_cap(mesh)
    j = int(start)
    steps = 0
    while True:
        dx, dy = px - x3[j], py - y3[j]
        t1 = (a1[j] * dx + b1[j] * dy) / den[j]
        t2 = (a2[j] * dx + b2[j] * dy) / den[j]
        t3 = 1.0 - t1 - t2
        theta = (t1, t2, t3)
        k = min(range(3), key=theta.__getitem__)
        if theta[k] >= WALK_TOL:
            return LocationResult(j, np.array(theta), steps, Status.INSIDE)
        nxt = int(nb[j, k])
        if nxt == NO_NEIGHBOR:
            return LocationResult(j, np.array(theta), steps, Status.OUTSIDE)
        if steps >= cap:
            break
        j = nxt
        steps += 1

    for jj in range(mesh.n_triangles):
        dx, dy = px - x3[jj], py - y3[jj]
        t1 = (a1[jj] * dx + b1[jj] * dy) / den[jj]
        t2 = (a2[jj] * dx + b2[jj] * dy) / den[jj]
        t3 = 1.0 - t1 - t2
        if min(t1, t2, t3) >= WALK_TOL:
            return LocationResult(jj, np.array([t1, t2, t3]), steps,
                                  Status.INSIDE, fallback=True)
    return LocationResult(j, np.array(theta), steps, Status.OUTSIDE,
                          fallback=True)


def locate_batch(mesh: Triangulation, starts, points,
                 parallel: bool = False) -> BatchLocations:
    """Walk-locate many points from per-point start triangles."""
    points = np.asarray(points, dtype=np.float64)
    starts = np.asarray(starts, dtype=np.int32)
    kern = _kernels.walk_batch_parallel if parallel else _kernels.walk_batch
    tri, theta, steps, inside, fb = kern(
        *mesh.bary_coefficients, mesh.neighbors, starts,
        np.ascontiguousarray(points[:, 0]), np.ascontiguousarray(points[:, 1]),
        _step_cap(mesh))
    return BatchLocations(tri, theta, steps, inside, fb)


def point_location_bw(mesh: Triangulation, ctx: WalkContext, queries,
                      strategy, parallel: bool = False
                      ) -> tuple[BatchLocations, StepStats]:
    """One sweep of the strategy walk over the per-node query list.

    Queries are index-aligned with the mesh nodes (one characteristic
    foot per node). Strategy A starts every walk from the node's stored
    triangle and never changes it; B does the same but adopts the found
    triangles for the next sweep; C processes nodes in spanning-tree
    order, starting each walk from the triangle just found for the
    parent. Out-of-domain queries leave the stored triangle untouched.
    Returns the located points plus the sweep's element-change stats.
    """
    strategy = WalkStrategy.coerce(strategy)
    queries = np.asarray(queries, dtype=np.float64)
    if queries.shape != (mesh.n_vertices, 2):
        raise ValueError(f"queries must be (N, 2) aligned with the mesh "
                         f"nodes, got {queries.shape}")
    if strategy is WalkStrategy.C:
        if ctx.parents is None or ctx.order is None:
            raise MeshError("strategy C requires the spanning tree; build "
                            "the WalkContext with with_tree=True")
        parents, order = ctx.parents, ctx.order
    else:
        parents = order = ctx.initial_triangles  # unused placeholders
    if parallel and strategy is WalkStrategy.C:
        raise ValueError("strategy C is ordered by the spanning tree and "
                         "runs serially")

    px = np.ascontiguousarray(queries[:, 0])
    py = np.ascontiguousarray(queries[:, 1])
    scode = {"a": 0, "b": 1, "c": 2}[strategy.value]
    if parallel:
        # A/B read the context per node with no cross-node dependency; B's
        # adoption of the found triangles happens after the full sweep
        tri, theta, steps, inside, fb = _kernels.walk_batch_parallel(
            *mesh.bary_coefficients, mesh.neighbors, ctx.initial_triangles,
            px, py, _step_cap(mesh))
        if scode == 1:
            np.copyto(ctx.initial_triangles, tri, where=inside)
    else:
        tri, theta, steps, inside, fb = _kernels.walk_sweep(
            *mesh.bary_coefficients, mesh.neighbors, ctx.initial_triangles,
            scode, parents, order, px, py, _step_cap(mesh))
    batch = BatchLocations(tri, theta, steps, inside, fb)
    return batch, batch.stats()


def walk_storage_bytes(mesh: Triangulation, strategy) -> int:
    """Walk-locator storage under the fixed 4/8/8-byte accounting model.

    Counts the neighbor list (3*N_t ints), the start-triangle list
    (N ints) and, for strategy C, the spanning-tree parent list
    (N ints). Mesh vertices/triangles are accounted separately (see
    :func:`mesh_storage_bytes`) since every locator shares them.
    """
    strategy = WalkStrategy.coerce(strategy)
    n_int = 3 * mesh.n_triangles + mesh.n_vertices
    if strategy is WalkStrategy.C:
        n_int += mesh.n_vertices
    return 4 * n_int


def mesh_storage_bytes(mesh: Triangulation) -> int:
    """Mesh payload common to all locators: 2N doubles + 3*N_t ints."""
    return 8 * 2 * mesh.n_vertices + 4 * 3 * mesh.n_triangles


class WalkLocator:
    """Stateful walk locator usable by the advection loop and benchmarks.

    Owns a private copy of the walk context so repeated runs stay
    independent.
    """

    def __init__(self, mesh: Triangulation, strategy, seed: int = 0,
                 ctx: WalkContext | None = None, parallel: bool = False):
        self.mesh = mesh
        self.strategy = WalkStrategy.coerce(strategy)
        if ctx is None:
            ctx = WalkContext.create(mesh, seed,
                                     with_tree=self.strategy is WalkStrategy.C)
        self.ctx = ctx.copy()
        self.parallel = parallel and self.strategy is not WalkStrategy.C

    @property
    def name(self) -> str:
        return f"walk-{self.strategy.value}"

    @property
    def storage_bytes(self) -> int:
        return walk_storage_bytes(self.mesh, self.strategy)

    def locate(self, points) -> BatchLocations:
        batch, _ = point_location_bw(self.mesh, self.ctx, points,
                                     self.strategy, parallel=self.parallel)
        return batch
