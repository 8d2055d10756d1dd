"""Triangular mesh substrate shared by every point locator.

Provides the :class:`Triangulation` container (vertices, triangles,
edge-opposite neighbor table), construction from Triangle-format text or
from the built-in generators, barycentric coordinates, the spanning tree
and per-node starting triangles used by the walk strategies, and a
validation pass over all structural invariants.

Conventions
-----------
* indices are 0-based internally; Triangle files are read/written with
  auto-detected (usually 1-based) indexing,
* triangles are stored counterclockwise,
* ``neighbors[j, k]`` is the triangle sharing the edge opposite vertex
  ``k`` of triangle ``j``, or :data:`NO_NEIGHBOR` on a boundary edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import Delaunay as _QhullDelaunay

NO_NEIGHBOR = -1

#: Unit square centered at the origin; the domain of the generators.
DOMAIN_MIN = -0.5
DOMAIN_MAX = 0.5


class MeshError(ValueError):
    """Malformed mesh input or broken mesh topology."""


# ---------------------------------------------------------------------------
# Core container
# ---------------------------------------------------------------------------

class Triangulation:
    """Immutable 2-D triangulation.

    Parameters
    ----------
    vertices : (N, 2) float array
        Node coordinates.
    triangles : (N_t, 3) int array
        Vertex index triples, counterclockwise.
    neighbors : (N_t, 3) int array
        ``neighbors[j, k]`` is the triangle across the edge opposite
        vertex ``k`` of triangle ``j``; ``NO_NEIGHBOR`` on the boundary.
    space_scale : float
        Mesh spacing Δx: 1/M for the structured grid, 1/sqrt(N)
        otherwise.

    Arrays are marked read-only; a built mesh is safe for concurrent
    readers.
    """

    def __init__(self, vertices, triangles, neighbors, space_scale):
        self.vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        self.triangles = np.ascontiguousarray(triangles, dtype=np.int32)
        self.neighbors = np.ascontiguousarray(neighbors, dtype=np.int32)
        self.space_scale = float(space_scale)
        for arr in (self.vertices, self.triangles, self.neighbors):
            arr.setflags(write=False)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @cached_property
    def bbox(self):
        """(xmin, xmax, ymin, ymax) of the vertex set."""
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return float(x.min()), float(x.max()), float(y.min()), float(y.max())

    def signed_areas(self) -> np.ndarray:
        """Signed area of every triangle (positive when CCW)."""
        p = self.vertices[self.triangles]
        u = p[:, 1] - p[:, 0]
        v = p[:, 2] - p[:, 0]
        return 0.5 * (u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])

    @cached_property
    def bary_coefficients(self):
        """Per-triangle coefficients of the closed-form barycentric ratios.

        Returns ``(a1, b1, a2, b2, x3, y3, den)`` with
        ``theta1 = (a1*(x-x3) + b1*(y-y3)) / den`` and
        ``theta2 = (a2*(x-x3) + b2*(y-y3)) / den``; ``den`` is twice the
        signed area, positive for the stored CCW orientation.
        """
        p = self.vertices[self.triangles]
        x1, y1 = p[:, 0, 0], p[:, 0, 1]
        x2, y2 = p[:, 1, 0], p[:, 1, 1]
        x3, y3 = p[:, 2, 0], p[:, 2, 1]
        a1 = y2 - y3
        b1 = x3 - x2
        a2 = y3 - y1
        b2 = x1 - x3
        den = a1 * (x1 - x3) + b1 * (y1 - y3)
        out = tuple(np.ascontiguousarray(a) for a in (a1, b1, a2, b2, x3, y3, den))
        for arr in out:
            arr.setflags(write=False)
        return out

    @cached_property
    def vertex_triangles(self):
        """CSR map vertex -> incident triangles, ascending per vertex.

        Returns ``(indptr, data)`` with the triangles of vertex ``i`` at
        ``data[indptr[i]:indptr[i + 1]]``.
        """
        flat = self.triangles.ravel()
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=self.n_vertices)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        data = (order // 3).astype(np.int32)
        return indptr.astype(np.int64), data

    @cached_property
    def vertex_adjacency(self):
        """CSR vertex adjacency over mesh edges, neighbors ascending.

        Returns ``(indptr, data)``.
        """
        t = self.triangles
        src = np.concatenate([t[:, 0], t[:, 1], t[:, 2], t[:, 1], t[:, 2], t[:, 0]])
        dst = np.concatenate([t[:, 1], t[:, 2], t[:, 0], t[:, 0], t[:, 1], t[:, 2]])
        pairs = np.unique(np.column_stack([src, dst]), axis=0)
        counts = np.bincount(pairs[:, 0], minlength=self.n_vertices)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return indptr.astype(np.int64), pairs[:, 1].astype(np.int32)

    def __repr__(self):
        return (f"Triangulation(N={self.n_vertices}, N_t={self.n_triangles}, "
                f"dx={self.space_scale:.4g})")


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _neighbor_table(n_vertices, triangles, lines=None):
    """Edge-opposite neighbor table; raises MeshError on non-manifold edges.

    ``lines`` optionally maps triangle row -> source line number for error
    messages.
    """
    n_t = triangles.shape[0]
    # local edge k is opposite vertex k: (k+1, k+2) mod 3
    ea = np.concatenate([triangles[:, 1], triangles[:, 2], triangles[:, 0]])
    eb = np.concatenate([triangles[:, 2], triangles[:, 0], triangles[:, 1]])
    owner = np.concatenate([np.arange(n_t)] * 3)
    slot = np.repeat(np.array([0, 1, 2]), n_t)
    lo = np.minimum(ea, eb)
    hi = np.maximum(ea, eb)
    order = np.lexsort((hi, lo))
    lo, hi, owner, slot = lo[order], hi[order], owner[order], slot[order]

    same = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
    if same.size >= 2 and np.any(same[1:] & same[:-1]):
        k = int(np.flatnonzero(same[1:] & same[:-1])[0])
        tris = owner[k:k + 3]
        where = ""
        if lines is not None:
            where = " (lines " + ", ".join(str(lines[t]) for t in tris) + ")"
        raise MeshError(
            f"non-manifold edge ({lo[k]}, {hi[k]}) shared by triangles "
            f"{sorted(int(t) for t in tris)}{where}")

    neighbors = np.full((n_t, 3), NO_NEIGHBOR, dtype=np.int32)
    start = np.flatnonzero(same)
    neighbors[owner[start], slot[start]] = owner[start + 1]
    neighbors[owner[start + 1], slot[start + 1]] = owner[start]
    return neighbors


def build_triangulation(vertices, triangles, space_scale=None, lines=None):
    """Assemble a :class:`Triangulation` from raw vertex/triangle arrays.

    Reorients clockwise triangles, rejects degenerate or out-of-range
    ones, and computes the neighbor table. ``lines`` optionally carries
    per-triangle source line numbers for error reporting.
    """
    vertices = np.asarray(vertices, dtype=np.float64)
    triangles = np.array(triangles, dtype=np.int32)  # copy: may reorient
    if vertices.ndim != 2 or vertices.shape[1] != 2:
        raise MeshError(f"vertices must be (N, 2), got {vertices.shape}")
    if triangles.ndim != 2 or triangles.shape[1] != 3:
        raise MeshError(f"triangles must be (N_t, 3), got {triangles.shape}")
    n = vertices.shape[0]

    def _where(j):
        return f"line {lines[j]}" if lines is not None else f"triangle {j}"

    bad = (triangles < 0) | (triangles >= n)
    if np.any(bad):
        j = int(np.flatnonzero(bad.any(axis=1))[0])
        raise MeshError(
            f"{_where(j)}: vertex index {triangles[j][bad[j]][0]} out of "
            f"range for {n} nodes")
    dup = ((triangles[:, 0] == triangles[:, 1])
           | (triangles[:, 1] == triangles[:, 2])
           | (triangles[:, 2] == triangles[:, 0]))
    if np.any(dup):
        j = int(np.flatnonzero(dup)[0])
        raise MeshError(f"{_where(j)}: repeated vertex index")

    p = vertices[triangles]
    u = p[:, 1] - p[:, 0]
    v = p[:, 2] - p[:, 0]
    area2 = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    if np.any(area2 == 0.0):
        j = int(np.flatnonzero(area2 == 0.0)[0])
        raise MeshError(f"{_where(j)}: zero-area triangle")
    cw = area2 < 0.0
    if np.any(cw):
        triangles[cw, 1], triangles[cw, 2] = (triangles[cw, 2].copy(),
                                              triangles[cw, 1].copy())

    neighbors = _neighbor_table(n, triangles, lines)
    if space_scale is None:
        space_scale = 1.0 / np.sqrt(n)
    return Triangulation(vertices, triangles, neighbors, space_scale)


# ---------------------------------------------------------------------------
# Triangle-format I/O (.node / .ele)
# ---------------------------------------------------------------------------

def _data_rows(text):
    """Yield (line_number, tokens) for non-blank, non-comment lines."""
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield ln, line.split()


def load_triangle_format(node_text: str, ele_text: str) -> Triangulation:
    """Build a mesh from Triangle-format ``.node`` and ``.ele`` file text.

    The indexing base (0 or 1) is detected from the first listed node
    index. Triangles are reoriented counterclockwise where needed and the
    space scale is set to 1/sqrt(N). Malformed headers, out-of-range
    indices, zero-area triangles and non-manifold edges raise
    :class:`MeshError` naming the offending line.
    """
    rows = _data_rows(node_text)
    try:
        ln, head = next(rows)
    except StopIteration:
        raise MeshError(".node: empty file") from None
    try:
        n_pts, dim, n_attr, n_marker = (int(tok) for tok in head[:4])
    except (ValueError, IndexError):
        raise MeshError(f".node line {ln}: malformed header {head!r}") from None
    if dim != 2 or n_pts < 1:
        raise MeshError(f".node line {ln}: expected '<#points> 2 <#attrs> "
                        f"<#markers>', got {head!r}")

    vertices = np.empty((n_pts, 2), dtype=np.float64)
    seen = np.zeros(n_pts, dtype=bool)
    base = None
    count = 0
    for ln, tok in rows:
        if len(tok) < 3:
            raise MeshError(f".node line {ln}: expected '<idx> <x> <y> ...'")
        try:
            idx = int(tok[0])
            x, y = float(tok[1]), float(tok[2])
        except ValueError:
            raise MeshError(f".node line {ln}: malformed record {tok!r}") from None
        if base is None:
            if idx not in (0, 1):
                raise MeshError(f".node line {ln}: first index {idx} is "
                                f"neither 0 nor 1; cannot detect base")
            base = idx
        i = idx - base
        if not 0 <= i < n_pts:
            raise MeshError(f".node line {ln}: index {idx} out of range")
        if seen[i]:
            raise MeshError(f".node line {ln}: duplicate index {idx}")
        seen[i] = True
        vertices[i] = (x, y)
        count += 1
    if count != n_pts:
        raise MeshError(f".node: header promises {n_pts} points, found {count}")

    rows = _data_rows(ele_text)
    try:
        ln, head = next(rows)
    except StopIteration:
        raise MeshError(".ele: empty file") from None
    try:
        n_tri, per_tri = int(head[0]), int(head[1])
    except (ValueError, IndexError):
        raise MeshError(f".ele line {ln}: malformed header {head!r}") from None
    if per_tri != 3 or n_tri < 1:
        raise MeshError(f".ele line {ln}: expected '<#triangles> 3 <#attrs>', "
                        f"got {head!r}")

    triangles = np.empty((n_tri, 3), dtype=np.int32)
    lines = np.empty(n_tri, dtype=np.int64)
    count = 0
    for ln, tok in rows:
        if len(tok) < 4:
            raise MeshError(f".ele line {ln}: expected '<idx> <i1> <i2> <i3>'")
        try:
            ref = [int(t) for t in tok[:4]]
        except ValueError:
            raise MeshError(f".ele line {ln}: malformed record {tok!r}") from None
        if count >= n_tri:
            raise MeshError(f".ele line {ln}: more records than the header's "
                            f"{n_tri}")
        for r in ref[1:]:
            if not 0 <= r - base < n_pts:
                raise MeshError(f".ele line {ln}: vertex index {r} out of "
                                f"range for {n_pts} nodes")
        triangles[count] = [r - base for r in ref[1:]]
        lines[count] = ln
        count += 1
    if count != n_tri:
        raise MeshError(f".ele: header promises {n_tri} triangles, found {count}")

    return build_triangulation(vertices, triangles, lines=lines)


def triangle_format_text(mesh: Triangulation) -> tuple[str, str]:
    """Render a mesh as (.node text, .ele text), 1-based indices."""
    node = [f"{mesh.n_vertices} 2 0 0"]
    for i, (x, y) in enumerate(mesh.vertices, start=1):
        node.append(f"{i} {float(x)!r} {float(y)!r}")  # repr is lossless
    ele = [f"{mesh.n_triangles} 3 0"]
    for j, (i1, i2, i3) in enumerate(mesh.triangles, start=1):
        ele.append(f"{j} {i1 + 1} {i2 + 1} {i3 + 1}")
    return "\n".join(node) + "\n", "\n".join(ele) + "\n"


def write_triangle_mesh(mesh: Triangulation, basepath) -> tuple[str, str]:
    """Write ``<basepath>.node`` and ``<basepath>.ele``; returns the paths."""
    base = str(basepath)
    if base.endswith(".node") or base.endswith(".ele"):
        base = base.rsplit(".", 1)[0]
    node_text, ele_text = triangle_format_text(mesh)
    node_path, ele_path = base + ".node", base + ".ele"
    with open(node_path, "w") as fh:
        fh.write(node_text)
    with open(ele_path, "w") as fh:
        fh.write(ele_text)
    return node_path, ele_path


def read_triangle_mesh(path) -> Triangulation:
    """Read a mesh from ``<base>.node`` / ``<base>.ele`` (pass either path)."""
    base = str(path)
    if base.endswith(".node") or base.endswith(".ele"):
        base = base.rsplit(".", 1)[0]
    with open(base + ".node") as fh:
        node_text = fh.read()
    with open(base + ".ele") as fh:
        ele_text = fh.read()
    return load_triangle_format(node_text, ele_text)


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def generate_courant_mesh(M: int) -> Triangulation:
    """Structured Courant triangulation of [-1/2, 1/2]^2 with M cells per side.

    Every grid cell (l, m) is split along its main diagonal. With 1-based
    labels matching the structured direct-location formulas, triangle
    ``2(Mm+l)+1`` is the side of the cell where the local x-fraction is
    below the local y-fraction, ``2(Mm+l)+2`` the other side. Internally
    these are triangle rows ``2(Mm+l)`` and ``2(Mm+l)+1``.
    """
    M = int(M)
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    coords = np.linspace(DOMAIN_MIN, DOMAIN_MAX, M + 1)
    xx, yy = np.meshgrid(coords, coords)
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    l, m = np.meshgrid(np.arange(M), np.arange(M))
    l, m = l.ravel(), m.ravel()
    v00 = m * (M + 1) + l
    v10 = v00 + 1
    v01 = v00 + (M + 1)
    v11 = v01 + 1
    cell = M * m + l
    triangles = np.empty((2 * M * M, 3), dtype=np.int32)
    triangles[2 * cell] = np.column_stack([v00, v11, v01])      # x-frac < y-frac
    triangles[2 * cell + 1] = np.column_stack([v00, v10, v11])  # x-frac >= y-frac
    return build_triangulation(vertices, triangles, space_scale=1.0 / M)


def generate_random_delaunay(n_points: int, seed: int) -> Triangulation:
    """Delaunay mesh of ``n_points`` uniform samples in [-1/2, 1/2]^2 plus
    the four corners.

    Deterministic for a fixed seed (PCG64 stream via
    ``numpy.random.default_rng``). The space scale is the 1/sqrt(N)
    estimate, N = n_points + 4.
    """
    n_points = int(n_points)
    if n_points < 3:
        raise ValueError(f"n_points must be >= 3, got {n_points}")
    rng = np.random.default_rng(seed)
    samples = rng.uniform(DOMAIN_MIN, DOMAIN_MAX, size=(n_points, 2))
    corners = np.array([[DOMAIN_MIN, DOMAIN_MIN], [DOMAIN_MAX, DOMAIN_MIN],
                        [DOMAIN_MAX, DOMAIN_MAX], [DOMAIN_MIN, DOMAIN_MAX]])
    vertices = np.vstack([samples, corners])

    tess = _QhullDelaunay(vertices)
    if tess.coplanar.size:
        raise MeshError(f"Delaunay construction dropped "
                        f"{tess.coplanar.shape[0]} degenerate point(s); "
                        f"retry with another seed")
    triangles = tess.simplices.astype(np.int32)
    if np.unique(triangles).size != vertices.shape[0]:
        raise MeshError("Delaunay construction left isolated vertices")
    return build_triangulation(vertices, triangles,
                               space_scale=1.0 / np.sqrt(vertices.shape[0]))


# ---------------------------------------------------------------------------
# Barycentric coordinates
# ---------------------------------------------------------------------------

def barycentric_coords(mesh: Triangulation, tri: int, p) -> np.ndarray:
    """Barycentric coordinates of point ``p`` in triangle ``tri``.

    Returns the length-3 array (theta1, theta2, theta3) of the closed-form
    ratios, with theta3 = 1 - theta1 - theta2. The coordinates reconstruct
    ``p`` as theta1*x1 + theta2*x2 + theta3*x3.
    """
    a1, b1, a2, b2, x3, y3, den = mesh.bary_coefficients
    d = den[tri]
    if d == 0.0:
        raise MeshError(f"triangle {tri} is degenerate (zero denominator)")
    dx = p[0] - x3[tri]
    dy = p[1] - y3[tri]
    t1 = (a1[tri] * dx + b1[tri] * dy) / d
    t2 = (a2[tri] * dx + b2[tri] * dy) / d
    return np.array([t1, t2, 1.0 - t1 - t2])


# ---------------------------------------------------------------------------
# Spanning tree and starting triangles (walk-strategy support)
# ---------------------------------------------------------------------------

def build_spanning_tree(mesh: Triangulation) -> tuple[np.ndarray, np.ndarray]:
    """Breadth-first spanning tree of the vertex adjacency graph.

    The root is the node closest to the center of the mesh bounding box
    (ties to the lowest index) and is its own parent. Returns
    ``(parents, order)`` where ``order`` is the BFS visit order, so every
    parent precedes its children. Raises :class:`MeshError` on a
    disconnected mesh, listing the unreached nodes.
    """
    n = mesh.n_vertices
    xmin, xmax, ymin, ymax = mesh.bbox
    center = np.array([0.5 * (xmin + xmax), 0.5 * (ymin + ymax)])
    dist2 = np.sum((mesh.vertices - center) ** 2, axis=1)
    root = int(np.argmin(dist2))

    indptr, adj = mesh.vertex_adjacency
    parents = np.full(n, -1, dtype=np.int32)
    order = np.empty(n, dtype=np.int32)
    parents[root] = root
    order[0] = root
    head, tail = 0, 1
    while head < tail:
        i = order[head]
        head += 1
        for k in adj[indptr[i]:indptr[i + 1]]:
            if parents[k] < 0:
                parents[k] = i
                order[tail] = k
                tail += 1
    if tail != n:
        missing = np.flatnonzero(parents < 0)
        shown = ", ".join(str(i) for i in missing[:10])
        more = "" if missing.size <= 10 else f", ... ({missing.size} total)"
        raise MeshError(f"mesh is disconnected; unreached nodes: {shown}{more}")
    return parents, order


def assign_initial_triangles(mesh: Triangulation, seed: int) -> np.ndarray:
    """Uniformly random incident triangle for every node (seeded).

    Raises :class:`MeshError` if some vertex has no incident triangle.
    """
    indptr, data = mesh.vertex_triangles
    counts = np.diff(indptr)
    if np.any(counts == 0):
        isolated = np.flatnonzero(counts == 0)
        raise MeshError(f"isolated vertices with no incident triangle: "
                        f"{isolated[:10].tolist()}")
    rng = np.random.default_rng(seed)
    pick = indptr[:-1] + np.floor(rng.random(mesh.n_vertices) * counts).astype(np.int64)
    return data[pick].astype(np.int32)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    """Outcome of :func:`validate`; empty ``violations`` means a clean mesh."""

    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "mesh OK"
        return "\n".join(self.violations)


def validate(mesh: Triangulation) -> ValidationReport:
    """Check every Triangulation invariant; violations go in the report.

    Covers index validity, CCW orientation, neighbor symmetry under the
    opposite-vertex convention, and the boundary sentinel appearing on
    exactly the edges shared by a single triangle.
    """
    rep = ValidationReport()
    t = mesh.triangles
    nb = mesh.neighbors
    n, n_t = mesh.n_vertices, mesh.n_triangles

    bad = (t < 0) | (t >= n)
    for j in np.flatnonzero(bad.any(axis=1)):
        rep.violations.append(f"triangle {j}: vertex index out of range")
    dup = ((t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 2] == t[:, 0]))
    for j in np.flatnonzero(dup):
        rep.violations.append(f"triangle {j}: repeated vertex index")
    if rep.violations:
        return rep  # remaining checks assume sane indices

    areas = mesh.signed_areas()
    for j in np.flatnonzero(areas <= 0.0):
        kind = "zero-area" if areas[j] == 0.0 else "clockwise"
        rep.violations.append(f"triangle {j}: {kind} (signed area {areas[j]:g})")

    # reference neighbor table from the triangle list alone
    try:
        ref = _neighbor_table(n, t)
    except MeshError as exc:
        rep.violations.append(str(exc))
        return rep
    for j, k in zip(*np.nonzero(ref != nb)):
        rep.violations.append(
            f"triangle {j} edge {k} (opposite vertex {t[j, k]}): neighbor "
            f"entry {nb[j, k]} but shared-edge scan gives {ref[j, k]}")
    # symmetry of whatever table is stored, reported against both triangles
    for j in range(n_t):
        for k in range(3):
            m = nb[j, k]
            if m == NO_NEIGHBOR:
                continue
            if not 0 <= m < n_t:
                rep.violations.append(f"triangle {j}: neighbor index {m} "
                                      f"out of range")
            elif j not in nb[m]:
                rep.violations.append(f"neighbor symmetry broken between "
                                      f"triangles {j} and {m}")
    return rep
