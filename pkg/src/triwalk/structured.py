"""Constant-time direct location on the structured Courant triangulation.

On the uniform diagonal-split grid of [-1/2, 1/2]^2 the enclosing
triangle of a point follows from two floor operations and one fractional
comparison, with no search at all; this is the structured-grid baseline
the walk strategies are compared against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import DOMAIN_MAX, DOMAIN_MIN, Triangulation, barycentric_coords, \
    generate_courant_mesh
from .walk import BatchLocations, LocationResult, Status


@dataclass
class StructuredGrid:
    """Courant triangulation plus the cell arithmetic that indexes it."""

    m: int
    dx: float
    mesh: Triangulation

    @classmethod
    def create(cls, m: int) -> "StructuredGrid":
        mesh = generate_courant_mesh(m)
        return cls(m=int(m), dx=1.0 / int(m), mesh=mesh)


def _cell_and_triangle(grid: StructuredGrid, px: float, py: float) -> int:
    m = grid.m
    dx = grid.dx
    l = min(int((px - DOMAIN_MIN) / dx), m - 1)
    mm = min(int((py - DOMAIN_MIN) / dx), m - 1)
    fx = px - DOMAIN_MIN - l * dx
    fy = py - DOMAIN_MIN - mm * dx
    # 1-based labels 2(Mm+l)+1 / 2(Mm+l)+2 are rows 2(Mm+l) / 2(Mm+l)+1
    j = 2 * (m * mm + l)
    if fx < fy:
        return j
    return j + 1


def direct_locate(grid: StructuredGrid, p) -> LocationResult:
    """Locate a point on the Courant grid with constant work.

    Computes the cell (l, m) by flooring the shifted coordinates (clamped
    so the top/right domain boundary stays in the last cell), picks the
    diagonal side by comparing the in-cell fractions (ties go to the
    even-labelled side), and returns the triangle together with its
    barycentric coordinates. Points outside [-1/2, 1/2]^2 are OUTSIDE.
    """
    px, py = float(p[0]), float(p[1])
    if not (DOMAIN_MIN <= px <= DOMAIN_MAX and DOMAIN_MIN <= py <= DOMAIN_MAX):
        return LocationResult(-1, np.zeros(3), 0, Status.OUTSIDE)
    j = _cell_and_triangle(grid, px, py)
    theta = barycentric_coords(grid.mesh, j, (px, py))
    return LocationResult(j, theta, 0, Status.INSIDE)


def direct_locate_batch(grid: StructuredGrid, points) -> BatchLocations:
    """Vectorized :func:`direct_locate` over many points."""
    points = np.asarray(points, dtype=np.float64)
    px = points[:, 0]
    py = points[:, 1]
    m = grid.m
    dx = grid.dx
    inside = ((px >= DOMAIN_MIN) & (px <= DOMAIN_MAX)
              & (py >= DOMAIN_MIN) & (py <= DOMAIN_MAX))
    l = np.minimum(((px - DOMAIN_MIN) / dx).astype(np.int64), m - 1)
    mm = np.minimum(((py - DOMAIN_MIN) / dx).astype(np.int64), m - 1)
    l = np.clip(l, 0, m - 1)
    mm = np.clip(mm, 0, m - 1)
    fx = px - DOMAIN_MIN - l * dx
    fy = py - DOMAIN_MIN - mm * dx
    tri = 2 * (m * mm + l) + np.where(fx < fy, 0, 1)
    tri = np.where(inside, tri, -1).astype(np.int32)

    a1, b1, a2, b2, x3, y3, den = grid.mesh.bary_coefficients
    jj = np.where(inside, tri, 0)
    ddx = px - x3[jj]
    ddy = py - y3[jj]
    t1 = (a1[jj] * ddx + b1[jj] * ddy) / den[jj]
    t2 = (a2[jj] * ddx + b2[jj] * ddy) / den[jj]
    theta = np.column_stack([t1, t2, 1.0 - t1 - t2])
    theta[~inside] = 0.0
    return BatchLocations(tri, theta, np.zeros(len(px), dtype=np.int32),
                          inside, np.zeros(len(px), dtype=bool))


class StructuredLocator:
    """Direct-location backend for the advection loop and benchmarks."""

    def __init__(self, grid: StructuredGrid):
        self.grid = grid
        self.mesh = grid.mesh

    @property
    def name(self) -> str:
        return "structured"

    @property
    def storage_bytes(self) -> int:
        # the direct formulas need no search structure at all
        return 0

    def locate(self, points) -> BatchLocations:
        return direct_locate_batch(self.grid, points)
