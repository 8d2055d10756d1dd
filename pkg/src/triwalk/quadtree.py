"""Quadtree point-location index over a triangulation.

Rectangles subdivide into four equal quadrants until one of three
stopping rules holds: the quad is vertex-free and meets at most ``q``
triangles, the quad holds exactly one vertex (any number of incident
triangles), or the quad meets no triangle at all. Leaves keep the list
of triangles whose closed intersection with the leaf rectangle is
nonempty, so a query descends to its leaf and tests only that list.

Construction-time vertex bookkeeping is discarded once the tree is
built; only triangle indices are needed to answer queries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import WALK_TOL
from .mesh import Triangulation, barycentric_coords
from .walk import BatchLocations, LocationResult, Status

#: default triangles-per-leaf bound; depth saturates above ~7 on regular meshes
DEFAULT_Q = 7
DEFAULT_MAX_DEPTH = 64

_CHILD_OFFSETS = ((0, 0), (1, 0), (0, 1), (1, 1))  # SW, SE, NW, NE


class QuadtreeError(RuntimeError):
    """Construction failure (depth cap hit, e.g. duplicate input points)."""


@dataclass
class Quadtree:
    """Flat-array quadtree; immutable once built.

    ``children[n]`` holds the four child node ids in (SW, SE, NW, NE)
    order or -1s when node ``n`` is a leaf; ``rects[n]`` is the node
    rectangle (x0, x1, y0, y1); leaf ``n``'s triangle list sits in
    ``tri_data[tri_indptr[n]:tri_indptr[n+1]]`` in ascending order.
    """

    children: np.ndarray
    rects: np.ndarray
    tri_indptr: np.ndarray
    tri_data: np.ndarray
    depths: np.ndarray
    q: int
    max_depth_reached: int

    @property
    def node_count(self) -> int:
        return self.children.shape[0]

    @property
    def leaf_count(self) -> int:
        return int(np.count_nonzero(self.children[:, 0] < 0))

    @property
    def leaf_triangle_index_count(self) -> int:
        """Total triangle indices stored across all leaves (with duplicates)."""
        return int(self.tri_data.shape[0])

    @property
    def root_rect(self) -> np.ndarray:
        return self.rects[0]

    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.children[:, 0] < 0)

    def leaf_triangles(self, node: int) -> np.ndarray:
        return self.tri_data[self.tri_indptr[node]:self.tri_indptr[node + 1]]


def _tri_rect_filter(geom, cand, x0, x1, y0, y1):
    """Candidate triangles whose closed shape meets the closed rectangle.

    Separating-axis test: the rectangle axes reduce to a bounding-box
    overlap check, the three edge normals are tested explicitly. Touching
    counts as intersecting, so separation must be strict.
    """
    bxmin, bxmax, bymin, bymax, nx, ny, tmin, tmax = geom
    m = ((bxmin[cand] <= x1) & (bxmax[cand] >= x0)
         & (bymin[cand] <= y1) & (bymax[cand] >= y0))
    cand = cand[m]
    if cand.size == 0:
        return cand
    cnx = nx[cand]
    cny = ny[cand]
    rlo = cnx * np.where(cnx > 0.0, x0, x1) + cny * np.where(cny > 0.0, y0, y1)
    rhi = cnx * np.where(cnx > 0.0, x1, x0) + cny * np.where(cny > 0.0, y1, y0)
    sep = (tmax[cand] < rlo) | (tmin[cand] > rhi)
    return cand[~sep.any(axis=1)]


def build_quadtree(mesh: Triangulation, q: int = DEFAULT_Q,
                   max_depth: int = DEFAULT_MAX_DEPTH) -> Quadtree:
    """Build the index over the mesh bounding box.

    ``q`` (>= 2) caps the triangle list of vertex-free leaves. The depth
    cap guards pathological input (coincident vertices can never be
    separated) and raises :class:`QuadtreeError` when exceeded.
    """
    q = int(q)
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")

    tv = mesh.vertices[mesh.triangles]                    # (N_t, 3, 2)
    edges = np.roll(tv, -1, axis=1) - tv
    nx = np.ascontiguousarray(-edges[:, :, 1])
    ny = np.ascontiguousarray(edges[:, :, 0])
    tproj = nx[:, :, None] * tv[:, None, :, 0] + ny[:, :, None] * tv[:, None, :, 1]
    geom = (tv[:, :, 0].min(axis=1), tv[:, :, 0].max(axis=1),
            tv[:, :, 1].min(axis=1), tv[:, :, 1].max(axis=1),
            nx, ny, tproj.min(axis=2), tproj.max(axis=2))
    vx = mesh.vertices[:, 0]
    vy = mesh.vertices[:, 1]

    children = [np.full(4, -1, dtype=np.int32)]
    rect_list = [mesh.bbox]
    depth_list = [0]
    leaf_tris: dict[int, np.ndarray] = {}

    all_tris = np.arange(mesh.n_triangles, dtype=np.int64)
    all_verts = np.arange(mesh.n_vertices, dtype=np.int64)
    stack = [(0, all_tris, all_verts)]
    max_depth_reached = 0
    while stack:
        node, cand_t, cand_v = stack.pop()
        x0, x1, y0, y1 = rect_list[node]
        depth = depth_list[node]
        tris = _tri_rect_filter(geom, cand_t, x0, x1, y0, y1)
        cvx = vx[cand_v]
        cvy = vy[cand_v]
        verts = cand_v[(cvx >= x0) & (cvx <= x1) & (cvy >= y0) & (cvy <= y1)]

        n_v = verts.size
        if tris.size == 0 or n_v == 1 or (n_v == 0 and tris.size <= q):
            leaf_tris[node] = tris
            max_depth_reached = max(max_depth_reached, depth)
            continue
        if depth >= max_depth:
            raise QuadtreeError(
                f"depth cap {max_depth} exceeded at rectangle "
                f"({x0:g}, {x1:g}) x ({y0:g}, {y1:g}) holding {n_v} vertices; "
                f"duplicate input points?")
        xm = 0.5 * (x0 + x1)
        ym = 0.5 * (y0 + y1)
        first = len(children)
        kids = np.arange(first, first + 4, dtype=np.int32)
        children[node] = kids
        for col, row in _CHILD_OFFSETS:
            children.append(np.full(4, -1, dtype=np.int32))
            rect_list.append((x0 if col == 0 else xm, xm if col == 0 else x1,
                              y0 if row == 0 else ym, ym if row == 0 else y1))
            depth_list.append(depth + 1)
        # LIFO order is irrelevant to the result; node ids are fixed above
        for kid in kids:
            stack.append((int(kid), tris, verts))

    n_nodes = len(children)
    child_arr = np.vstack(children).astype(np.int32)
    rect_arr = np.asarray(rect_list, dtype=np.float64)
    indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    for node, tris in leaf_tris.items():
        indptr[node + 1] = tris.size
    np.cumsum(indptr, out=indptr)
    tri_data = np.empty(indptr[-1], dtype=np.int32)
    for node, tris in leaf_tris.items():
        tri_data[indptr[node]:indptr[node + 1]] = tris
    tree = Quadtree(child_arr, rect_arr, indptr, tri_data,
                    np.asarray(depth_list, dtype=np.int32), q,
                    max_depth_reached)
    for arr in (tree.children, tree.rects, tree.tri_indptr, tree.tri_data,
                tree.depths):
        arr.setflags(write=False)
    return tree


def qt_locate(tree: Quadtree, p, mesh: Triangulation) -> LocationResult:
    """Locate one point: descend to its leaf, test the listed triangles.

    Returns the first listed triangle containing the point (all
    barycentric coordinates >= -1e-12) or an OUTSIDE result when the
    point misses the root box or its leaf list (``steps`` reports the
    number of triangle tests). Boundary ties descend into the first
    matching child in (SW, SE, NW, NE) order.
    """
    px, py = float(p[0]), float(p[1])
    x0, x1, y0, y1 = tree.root_rect
    if not (x0 <= px <= x1 and y0 <= py <= y1):
        return LocationResult(-1, np.zeros(3), 0, Status.OUTSIDE)
    node = 0
    while tree.children[node, 0] >= 0:
        xm = 0.5 * (x0 + x1)
        ym = 0.5 * (y0 + y1)
        col = 0 if px <= xm else 1
        row = 0 if py <= ym else 1
        node = int(tree.children[node, 2 * row + col])
        x0, x1 = (x0, xm) if col == 0 else (xm, x1)
        y0, y1 = (y0, ym) if row == 0 else (ym, y1)
    tests = 0
    for j in tree.leaf_triangles(node):
        tests += 1
        theta = barycentric_coords(mesh, int(j), (px, py))
        if theta.min() >= WALK_TOL:
            return LocationResult(int(j), theta, tests, Status.INSIDE)
    return LocationResult(-1, np.zeros(3), tests, Status.OUTSIDE)


def qt_locate_batch(tree: Quadtree, points, mesh: Triangulation
                    ) -> tuple[BatchLocations, np.ndarray, np.ndarray]:
    """Compiled batch version of :func:`qt_locate`.

    Returns ``(locations, visits, tests)`` where ``visits`` counts quads
    entered per query and ``tests`` the triangle containment tests (also
    stored as ``locations.steps``).
    """
    points = np.asarray(points, dtype=np.float64)
    tri, theta, inside, visits, tests = _kernels.quadtree_query(
        tree.children, tree.tri_indptr, tree.tri_data,
        np.ascontiguousarray(tree.root_rect), *mesh.bary_coefficients,
        np.ascontiguousarray(points[:, 0]), np.ascontiguousarray(points[:, 1]))
    batch = BatchLocations(tri, theta, tests, inside,
                           np.zeros(len(tri), dtype=bool))
    return batch, visits, tests


def qt_depth(tree: Quadtree) -> int:
    """Longest root-to-leaf path; the root alone is depth 0."""
    return tree.max_depth_reached


def qt_storage_bytes(tree: Quadtree) -> int:
    """Tree storage under the fixed 4/8/8-byte accounting model.

    Every tree node records its four rectangle coordinates (doubles) and
    four child pointers; leaves additionally store one 4-byte integer
    per listed triangle index. The accounting is the model, independent
    of the in-memory layout actually used here.
    """
    return tree.node_count * (4 * 8 + 4 * 8) + 4 * tree.leaf_triangle_index_count


class QuadtreeLocator:
    """Quadtree-backed locator for the advection loop and benchmarks."""

    def __init__(self, mesh: Triangulation, q: int = DEFAULT_Q,
                 tree: Quadtree | None = None):
        self.mesh = mesh
        self.tree = tree if tree is not None else build_quadtree(mesh, q)
        self.last_visits: np.ndarray | None = None

    @property
    def name(self) -> str:
        return "quadtree"

    @property
    def storage_bytes(self) -> int:
        return qt_storage_bytes(self.tree)

    def locate(self, points) -> BatchLocations:
        batch, visits, _ = qt_locate_batch(self.tree, points, self.mesh)
        self.last_visits = visits
        return batch
