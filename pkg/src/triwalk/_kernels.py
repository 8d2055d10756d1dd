"""Compiled inner loops for the barycentric walk and the quadtree query.

Everything here operates on the flat arrays owned by the public modules;
semantics (tolerance, argmin tie-breaking, step cap, fallback scan) are
mirrored by the pure-Python reference implementations in ``walk`` and
``quadtree``, and the test suite cross-checks the two paths.
"""

import numpy as np
import numba
from numba import njit, prange

# the portable threading layer; the parallel kernels are opt-in anyway
numba.config.THREADING_LAYER = "workqueue"

# acceptance tolerance on barycentric coordinates: a point is inside when
# min(theta) >= WALK_TOL, so shared-edge points belong to both triangles
WALK_TOL = -1e-12


@njit(cache=True, inline="always")
def _argmin3(t1, t2, t3):
    # ties resolve to the lowest vertex position
    if t1 <= t2:
        if t1 <= t3:
            return 0, t1
        return 2, t3
    if t2 <= t3:
        return 1, t2
    return 2, t3


@njit(cache=True)
def _walk_one(a1, b1, a2, b2, x3, y3, den, neighbors, j0, px, py, cap):
    """Walk from triangle j0 toward (px, py).

    Returns (triangle, t1, t2, t3, steps, inside, fallback). ``steps``
    counts element changes. After ``cap`` changes the walk falls back to
    an exhaustive ascending scan of all triangles.
    """
    j = j0
    steps = 0
    while True:
        dx = px - x3[j]
        dy = py - y3[j]
        t1 = (a1[j] * dx + b1[j] * dy) / den[j]
        t2 = (a2[j] * dx + b2[j] * dy) / den[j]
        t3 = 1.0 - t1 - t2
        k, tmin = _argmin3(t1, t2, t3)
        if tmin >= WALK_TOL:
            return j, t1, t2, t3, steps, True, False
        nxt = neighbors[j, k]
        if nxt < 0:
            return j, t1, t2, t3, steps, False, False
        if steps >= cap:
            break
        j = nxt
        steps += 1

    for jj in range(a1.shape[0]):
        dx = px - x3[jj]
        dy = py - y3[jj]
        t1 = (a1[jj] * dx + b1[jj] * dy) / den[jj]
        t2 = (a2[jj] * dx + b2[jj] * dy) / den[jj]
        t3 = 1.0 - t1 - t2
        if t1 >= WALK_TOL and t2 >= WALK_TOL and t3 >= WALK_TOL:
            return jj, t1, t2, t3, steps, True, True
    return j, t1, t2, t3, steps, False, True


@njit(cache=True)
def walk_batch(a1, b1, a2, b2, x3, y3, den, neighbors, starts, px, py, cap):
    """Locate every (px[i], py[i]) starting from starts[i]."""
    n = px.shape[0]
    tri = np.empty(n, np.int32)
    theta = np.empty((n, 3), np.float64)
    steps = np.zeros(n, np.int32)
    inside = np.zeros(n, np.bool_)
    fallback = np.zeros(n, np.bool_)
    for i in range(n):
        j, t1, t2, t3, st, ins, fb = _walk_one(
            a1, b1, a2, b2, x3, y3, den, neighbors, starts[i], px[i], py[i], cap)
        tri[i] = j
        theta[i, 0] = t1
        theta[i, 1] = t2
        theta[i, 2] = t3
        steps[i] = st
        inside[i] = ins
        fallback[i] = fb
    return tri, theta, steps, inside, fallback


@njit(cache=True, parallel=True)
def walk_batch_parallel(a1, b1, a2, b2, x3, y3, den, neighbors, starts,
                        px, py, cap):
    """Parallel twin of :func:`walk_batch` (per-point state, no shared writes)."""
    n = px.shape[0]
    tri = np.empty(n, np.int32)
    theta = np.empty((n, 3), np.float64)
    steps = np.zeros(n, np.int32)
    inside = np.zeros(n, np.bool_)
    fallback = np.zeros(n, np.bool_)
    for i in prange(n):
        j, t1, t2, t3, st, ins, fb = _walk_one(
            a1, b1, a2, b2, x3, y3, den, neighbors, starts[i], px[i], py[i], cap)
        tri[i] = j
        theta[i, 0] = t1
        theta[i, 1] = t2
        theta[i, 2] = t3
        steps[i] = st
        inside[i] = ins
        fallback[i] = fb
    return tri, theta, steps, inside, fallback


@njit(cache=True)
def walk_sweep(a1, b1, a2, b2, x3, y3, den, neighbors, t0, strategy,
               parents, order, px, py, cap):
    """One full sweep of the walk point location over all nodes.

    strategy: 0 = start from the node's own stored triangle (kept fixed),
    1 = same start, then overwrite the stored triangles with the found
    ones after the sweep, 2 = visit nodes in ``order`` and start each walk
    from the parent's already-updated triangle, overwriting immediately.
    Out-of-domain queries never overwrite the stored triangle. ``t0`` is
    modified in place for strategies 1 and 2.
    """
    n = px.shape[0]
    tri = np.empty(n, np.int32)
    theta = np.empty((n, 3), np.float64)
    steps = np.zeros(n, np.int32)
    inside = np.zeros(n, np.bool_)
    fallback = np.zeros(n, np.bool_)
    for idx in range(n):
        if strategy == 2:
            i = order[idx]
            j0 = t0[parents[i]]
        else:
            i = idx
            j0 = t0[i]
        j, t1, t2, t3, st, ins, fb = _walk_one(
            a1, b1, a2, b2, x3, y3, den, neighbors, j0, px[i], py[i], cap)
        tri[i] = j
        theta[i, 0] = t1
        theta[i, 1] = t2
        theta[i, 2] = t3
        steps[i] = st
        inside[i] = ins
        fallback[i] = fb
        if strategy == 2 and ins:
            t0[i] = j
    if strategy == 1:
        for i in range(n):
            if inside[i]:
                t0[i] = tri[i]
    return tri, theta, steps, inside, fallback


@njit(cache=True)
def quadtree_query(children, tri_indptr, tri_data, root_rect,
                   a1, b1, a2, b2, x3, y3, den, px, py):
    """Descend to the leaf holding each point and test its triangle list.

    Returns (tri, theta, inside, visits, tests); ``visits`` counts quads
    entered (0 when the point is outside the root box), ``tests`` the
    barycentric containment tests at the leaf. Ties on a child boundary
    descend into the first matching child in (SW, SE, NW, NE) order,
    i.e. toward the low quadrant.
    """
    n = px.shape[0]
    tri = np.full(n, -1, np.int32)
    theta = np.zeros((n, 3), np.float64)
    inside = np.zeros(n, np.bool_)
    visits = np.zeros(n, np.int32)
    tests = np.zeros(n, np.int32)
    for i in range(n):
        x = px[i]
        y = py[i]
        x0 = root_rect[0]
        x1 = root_rect[1]
        y0 = root_rect[2]
        y1 = root_rect[3]
        if x < x0 or x > x1 or y < y0 or y > y1:
            continue
        node = 0
        nv = 1
        while children[node, 0] >= 0:
            xm = 0.5 * (x0 + x1)
            ym = 0.5 * (y0 + y1)
            col = 0 if x <= xm else 1
            row = 0 if y <= ym else 1
            node = children[node, 2 * row + col]
            if col == 0:
                x1 = xm
            else:
                x0 = xm
            if row == 0:
                y1 = ym
            else:
                y0 = ym
            nv += 1
        visits[i] = nv
        nt = 0
        for p in range(tri_indptr[node], tri_indptr[node + 1]):
            j = tri_data[p]
            nt += 1
            dx = x - x3[j]
            dy = y - y3[j]
            t1 = (a1[j] * dx + b1[j] * dy) / den[j]
            t2 = (a2[j] * dx + b2[j] * dy) / den[j]
            t3 = 1.0 - t1 - t2
            if t1 >= WALK_TOL and t2 >= WALK_TOL and t3 >= WALK_TOL:
                tri[i] = j
                theta[i, 0] = t1
                theta[i, 1] = t2
                theta[i, 2] = t3
                inside[i] = True
                break
        tests[i] = nt
    return tri, theta, inside, visits, tests


def warm_up():
    """Compile the kernels on a minimal input (call before timed regions)."""
    one = np.ones(1)
    nb = np.full((1, 3), -1, np.int32)
    starts = np.zeros(1, np.int32)
    walk_batch(one, one, one, one, one - 1, one - 1, one, nb, starts,
               one * 0.2, one * 0.2, 4)
    walk_sweep(one, one, one, one, one - 1, one - 1, one, nb,
               starts.copy(), 1, starts, starts, one * 0.2, one * 0.2, 4)
    quadtree_query(np.full((1, 4), -1, np.int32), np.array([0, 1], np.int64),
                   np.zeros(1, np.int32), np.array([0.0, 1.0, 0.0, 1.0]),
                   one, one, one, one, one - 1, one - 1, one,
                   one * 0.2, one * 0.2)
