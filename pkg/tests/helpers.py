"""Independent oracles used across the test suite.

Everything here recomputes geometry through a different route than the
library (LAPACK-inverted affine maps, incircle determinants, Python
re-implementations of the sweep bookkeeping) so agreement checks are
meaningful.
"""

import numpy as np

from triwalk import Status, build_triangulation, validate, walk_from

TOL = 1e-12


class BruteForceOracle:
    """All-triangles containment scan via per-triangle inverted maps."""

    def __init__(self, mesh):
        self.mesh = mesh
        tv = mesh.vertices[mesh.triangles]
        mats = np.stack([tv[:, 0] - tv[:, 2], tv[:, 1] - tv[:, 2]], axis=-1)
        self.inv = np.linalg.inv(mats)          # (N_t, 2, 2)
        self.origin = tv[:, 2]                  # (N_t, 2)

    def theta(self, points):
        """(n_q, N_t, 3) barycentric coordinates of every point in every
        triangle."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        rel = points[:, None, :] - self.origin[None, :, :]
        t12 = np.einsum("tij,qtj->qti", self.inv, rel)
        t3 = 1.0 - t12[..., 0] - t12[..., 1]
        return np.concatenate([t12, t3[..., None]], axis=-1)

    def containers(self, p):
        """Ascending indices of all triangles containing ``p`` (tol -1e-12)."""
        th = self.theta([p])[0]
        return np.flatnonzero(th.min(axis=1) >= -TOL)

    def scan(self, points, chunk=256):
        """Per-point (container count, lowest containing triangle or -1)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        counts = np.empty(len(points), dtype=np.int64)
        first = np.full(len(points), -1, dtype=np.int64)
        for lo in range(0, len(points), chunk):
            th = self.theta(points[lo:lo + chunk])
            ok = th.min(axis=2) >= -TOL
            counts[lo:lo + chunk] = ok.sum(axis=1)
            hit = ok.argmax(axis=1)
            first[lo:lo + chunk] = np.where(ok.any(axis=1), hit, -1)
        return counts, first

    def accepts(self, tri, p):
        """Does triangle ``tri`` contain ``p`` under the -1e-12 tolerance?"""
        rel = np.asarray(p, dtype=float) - self.origin[tri]
        t12 = self.inv[tri] @ rel
        return min(t12[0], t12[1], 1.0 - t12[0] - t12[1]) >= -TOL


def incircle_sign(a, b, c, d):
    """Positive when d is strictly inside the circumcircle of CCW (a, b, c)."""
    m = np.array([
        [a[0] - d[0], a[1] - d[1], (a[0] - d[0]) ** 2 + (a[1] - d[1]) ** 2],
        [b[0] - d[0], b[1] - d[1], (b[0] - d[0]) ** 2 + (b[1] - d[1]) ** 2],
        [c[0] - d[0], c[1] - d[1], (c[0] - d[0]) ** 2 + (c[1] - d[1]) ** 2],
    ])
    return np.linalg.det(m)


def circumcircle_violations(mesh, tol=TOL):
    """(triangle, vertex) pairs violating the empty-circumcircle property.

    A violation is a vertex strictly inside a circumcircle beyond ``tol``
    relative slack.
    """
    out = []
    pts = mesh.vertices
    for j, (i1, i2, i3) in enumerate(mesh.triangles):
        a, b, c = pts[i1], pts[i2], pts[i3]
        scale = max(np.abs([a, b, c]).max(), 1.0) ** 4
        for i in range(mesh.n_vertices):
            if i in (i1, i2, i3):
                continue
            if incircle_sign(a, b, c, pts[i]) > tol * scale:
                out.append((j, i))
    return out


def brute_delaunay_triangle_count(points):
    """Triangles of the Delaunay triangulation by exhaustive triples.

    Counts the non-degenerate triples whose circumcircle holds no other
    point strictly inside; assumes general position.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a, b, c = points[i], points[j], points[k]
                area2 = ((b[0] - a[0]) * (c[1] - a[1])
                         - (b[1] - a[1]) * (c[0] - a[0]))
                if area2 == 0.0:
                    continue
                if area2 < 0.0:
                    b, c = c, b
                empty = True
                for m in range(n):
                    if m in (i, j, k):
                        continue
                    if incircle_sign(a, b, c, points[m]) > 0.0:
                        empty = False
                        break
                if empty:
                    count += 1
    return count


def reference_sweep(mesh, t0, queries, strategy, parents=None, order=None):
    """Python mirror of the strategy sweep, built on walk_from.

    Returns (triangles, coords, steps, inside, starts_used) and mutates
    ``t0`` exactly as the sweep contract specifies.
    """
    n = mesh.n_vertices
    tri = np.empty(n, dtype=np.int64)
    coords = np.empty((n, 3))
    steps = np.zeros(n, dtype=np.int64)
    inside = np.zeros(n, dtype=bool)
    starts = np.empty(n, dtype=np.int64)
    idx_order = order if strategy == "c" else np.arange(n)
    for i in (int(x) for x in idx_order):
        j0 = int(t0[parents[i]]) if strategy == "c" else int(t0[i])
        starts[i] = j0
        res = walk_from(mesh, j0, queries[i])
        tri[i] = res.triangle
        coords[i] = res.coords
        steps[i] = res.steps
        inside[i] = res.status is Status.INSIDE
        if strategy == "c" and inside[i]:
            t0[i] = res.triangle
    if strategy == "b":
        np.copyto(t0, tri.astype(t0.dtype), where=inside)
    return tri, coords, steps, inside, starts


def flip_edge(mesh, j1, k1):
    """Flip the edge opposite vertex k1 of triangle j1.

    Returns the re-built (non-Delaunay) mesh, or None when the edge is on
    the boundary or the surrounding quad is not strictly convex.
    """
    t = mesh.triangles
    j2 = int(mesh.neighbors[j1, k1])
    if j2 < 0:
        return None
    u, v = int(t[j1, (k1 + 1) % 3]), int(t[j1, (k1 + 2) % 3])
    w1 = int(t[j1, k1])
    other = [int(t[j2, k]) for k in range(3) if int(t[j2, k]) not in (u, v)]
    if len(other) != 1:
        return None
    w2 = other[0]
    pts = mesh.vertices

    def cross(a, b, c):
        return ((pts[b, 0] - pts[a, 0]) * (pts[c, 1] - pts[a, 1])
                - (pts[b, 1] - pts[a, 1]) * (pts[c, 0] - pts[a, 0]))

    quad = [u, w2, v, w1]
    if not all(cross(quad[i], quad[(i + 1) % 4], quad[(i + 2) % 4]) > 1e-12
               for i in range(4)):
        return None
    new_t = t.copy()
    new_t[j1] = (u, w2, w1)
    new_t[j2] = (w2, v, w1)
    flipped = build_triangulation(mesh.vertices, new_t,
                                  space_scale=mesh.space_scale)
    assert validate(flipped).ok
    return flipped
