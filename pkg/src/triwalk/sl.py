"""Semi-Lagrangian advection: Euler characteristic tracking plus P1
interpolation, with the point locator plugged in.

One time step tracks every node one Euler step backward along the
advecting field, locates the foot of that characteristic with the chosen
locator (quadtree, walk strategy, or structured direct location),
and sets the node's new value to the P1 interpolant of the old solution
at the foot. Nodes whose foot leaves the domain keep their previous
value. The loop profiles the three phases separately so the share of
point location in the total load can be reported.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from .mesh import Triangulation
from .walk import BatchLocations, LocationResult, Status, StepStats

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Advecting fields
# ---------------------------------------------------------------------------

class VectorField:
    """Advecting velocity field with declared Lipschitz constants.

    Use the constructors :meth:`rotating`, :meth:`constant`, :meth:`zero`
    or :meth:`custom`. Calling the field evaluates it on an (n, 2) array
    of points at time ``t``.
    """

    def __init__(self, kind, fn, lipschitz_x, lipschitz_t, c0=0.0, c1=0.0):
        self.kind = kind
        self._fn = fn
        self.lipschitz_x = float(lipschitz_x)
        self.lipschitz_t = float(lipschitz_t)
        self.c0 = float(c0)
        self.c1 = float(c1)

    @classmethod
    def rotating(cls, c0: float, c1: float) -> "VectorField":
        """Unit-norm rotating field (cos(c0*|x| + c1*t), sin(c0*|x| + c1*t)).

        Its Lipschitz constants are L_x = c0 and L_t = c1.
        """
        def fn(points, t):
            angle = c0 * np.hypot(points[:, 0], points[:, 1]) + c1 * t
            return np.column_stack([np.cos(angle), np.sin(angle)])

        return cls("rotating", fn, lipschitz_x=c0, lipschitz_t=c1, c0=c0, c1=c1)

    @classmethod
    def constant(cls, vx: float, vy: float) -> "VectorField":
        def fn(points, t):
            out = np.empty_like(points)
            out[:, 0] = vx
            out[:, 1] = vy
            return out

        return cls("constant", fn, lipschitz_x=0.0, lipschitz_t=0.0)

    @classmethod
    def zero(cls) -> "VectorField":
        return cls.constant(0.0, 0.0)

    @classmethod
    def custom(cls, fn, lipschitz_x: float, lipschitz_t: float) -> "VectorField":
        """Wrap ``fn(points, t) -> (n, 2)`` with caller-declared constants."""
        return cls("custom", fn, lipschitz_x, lipschitz_t)

    def __call__(self, points, t: float) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return self._fn(points, float(t))


def eval_field(field: VectorField, x, t: float) -> np.ndarray:
    """Field value at a single point; returns a length-2 array."""
    return field(np.asarray(x, dtype=np.float64).reshape(1, 2), t)[0]


def euler_feet(mesh: Triangulation, field: VectorField, n: int, dt: float,
               at_arrival_time: bool = False) -> np.ndarray:
    """Feet of the characteristics for the step t_n -> t_{n+1}.

    One explicit Euler step backward from every node:
    ``q_i = x_i - dt * f(x_i, t_n)``. With ``at_arrival_time`` the field
    is evaluated at t_{n+1} instead (the two conventions coexist in the
    scheme's derivation; the step-start one is the default).
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    t = (n + 1) * dt if at_arrival_time else n * dt
    return mesh.vertices - dt * field(mesh.vertices, t)


def gaussian_bump(sigma: float = 0.1):
    """Radial Gaussian initial datum exp(-|x|^2 / (2 sigma^2))."""
    def u0(points):
        points = np.asarray(points, dtype=np.float64)
        r2 = points[:, 0] ** 2 + points[:, 1] ** 2
        return np.exp(-r2 / (2.0 * sigma * sigma))

    return u0


# ---------------------------------------------------------------------------
# P1 interpolation
# ---------------------------------------------------------------------------

def _convex_weights(theta: np.ndarray) -> np.ndarray:
    """Clamp barycentric triples into [0, 1] and renormalize to sum 1.

    The walk accepts coordinates down to -1e-12; clamping restores a
    convex combination so interpolated values can never leave the local
    value range.
    """
    w = np.clip(theta, 0.0, 1.0)
    return w / w.sum(axis=-1, keepdims=True)


def p1_interpolate(values, loc: LocationResult, mesh: Triangulation) -> float:
    """P1 interpolant theta1*v1 + theta2*v2 + theta3*v3 at a located point."""
    if loc.status is not Status.INSIDE:
        raise ValueError("cannot interpolate an OUTSIDE location")
    values = np.asarray(values, dtype=np.float64)
    vv = values[mesh.triangles[loc.triangle]]
    w = _convex_weights(loc.coords)
    out = float(w @ vv)
    # guard the maximum principle against the last rounding
    return min(max(out, float(vv.min())), float(vv.max()))


def _p1_apply(values: np.ndarray, batch: BatchLocations,
              mesh: Triangulation) -> np.ndarray:
    """New node values from one located sweep; outside feet keep the old."""
    tri = np.where(batch.inside, batch.triangles, 0)
    vv = values[mesh.triangles[tri]]                    # (n, 3)
    # outside rows carry no usable coordinates; give them a harmless triple
    theta = np.where(batch.inside[:, None], batch.coords, 1.0 / 3.0)
    w = _convex_weights(theta)
    out = np.einsum("ij,ij->i", w, vv)
    np.clip(out, vv.min(axis=1), vv.max(axis=1), out=out)
    return np.where(batch.inside, out, values)


# ---------------------------------------------------------------------------
# Advection loop
# ---------------------------------------------------------------------------

@dataclass
class SLState:
    """Node values at one time level plus the step bookkeeping."""

    values: np.ndarray
    time_index: int
    dt: float
    dx: float
    courant: float


@dataclass
class SLProfile:
    """Per-phase accumulated wall time of one advection run."""

    t_query: float = 0.0
    t_locate: float = 0.0
    t_interp: float = 0.0
    n_steps: int = 0

    @property
    def t_total(self) -> float:
        return self.t_query + self.t_locate + self.t_interp

    @property
    def locate_fraction(self) -> float:
        total = self.t_total
        return self.t_locate / total if total > 0.0 else float("nan")


@dataclass
class SLRun:
    """Outcome of :func:`sl_advect`: snapshots, per-step stats, profile."""

    states: list
    step_stats: list
    profile: SLProfile
    locator_name: str

    @property
    def final(self) -> SLState:
        return self.states[-1]


def sl_advect(mesh: Triangulation, field: VectorField, u0, dt: float,
              t_final: float, locator, snapshot_every: int | None = None,
              at_arrival_time: bool = False) -> SLRun:
    """Advect ``u0`` with the basic semi-Lagrangian scheme.

    ``u0`` is a callable sampled at the nodes (or a ready (N,) array);
    ``locator`` is any object with ``locate(points) -> BatchLocations``
    (see WalkLocator, QuadtreeLocator, StructuredLocator). Runs
    ceil(t_final / dt) steps. Snapshots keep the state every
    ``snapshot_every`` steps (the initial and final states are always
    kept); ``snapshot_every=None`` keeps only those two.

    The scheme is stable for any Courant number, but crossing
    characteristics (lipschitz_x * dt >= 1) put it in an unphysical
    regime; that case is only warned about, matching the reference
    experiments.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if field.lipschitz_x * dt >= 1.0:
        logger.warning(
            "L_x*dt = %.3g >= 1: characteristics of adjacent nodes may "
            "cross; the run continues in this unstable regime",
            field.lipschitz_x * dt)

    values = np.asarray(u0(mesh.vertices) if callable(u0) else u0,
                        dtype=np.float64).copy()
    if values.shape != (mesh.n_vertices,):
        raise ValueError(f"u0 must give one value per node, got shape "
                         f"{values.shape}")
    dx = mesh.space_scale
    courant = dt / dx
    n_steps = math.ceil(t_final / dt - 1e-12)

    def snap(n, vals):
        return SLState(vals.copy(), n, dt, dx, courant)

    states = [snap(0, values)]
    step_stats: list[StepStats] = []
    profile = SLProfile(n_steps=n_steps)
    clock = time.perf_counter

    for n in range(n_steps):
        t0 = clock()
        feet = euler_feet(mesh, field, n, dt, at_arrival_time)
        t1 = clock()
        batch = locator.locate(feet)
        t2 = clock()
        values = _p1_apply(values, batch, mesh)
        t3 = clock()
        profile.t_query += t1 - t0
        profile.t_locate += t2 - t1
        profile.t_interp += t3 - t2
        step_stats.append(batch.stats())
        if snapshot_every and (n + 1) % snapshot_every == 0 and n + 1 < n_steps:
            states.append(snap(n + 1, values))
    states.append(snap(n_steps, values))
    return SLRun(states, step_stats, profile, getattr(locator, "name", "?"))


def export_snapshot_csv(mesh: Triangulation, state: SLState, path) -> None:
    """Write a solution snapshot as ``node,x,y,value`` CSV rows."""
    with open(path, "w") as fh:
        fh.write("node,x,y,value\n")
        for i in range(mesh.n_vertices):
            fh.write(f"{i},{float(mesh.vertices[i, 0])!r},"
                     f"{float(mesh.vertices[i, 1])!r},"
                     f"{float(state.values[i])!r}\n")
