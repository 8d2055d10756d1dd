"""Direct location on the structured Courant grid versus the walk.

On the diagonal-split uniform grid the containing triangle follows from
two floor operations: constant work, no data structure at all. This
script checks the formula agrees with the walk everywhere off the cell
diagonals, then times both on the advection-feet workload so the
structured baseline can be compared with the walk strategy B.

Run: python3 demos/05_structured_vs_walk.py
"""

import math
import time

import numpy as np

import triwalk as tw
from triwalk import _kernels

_kernels.warm_up()

grid = tw.StructuredGrid.create(128)
mesh = grid.mesh
print(f"courant grid: M={grid.m}, N={mesh.n_vertices}, "
      f"N_t={mesh.n_triangles}\n")

# agreement off the diagonals
rng = np.random.default_rng(9)
pts = rng.uniform(-0.5, 0.5, size=(20000, 2))
fx = (pts[:, 0] + 0.5) % grid.dx
fy = (pts[:, 1] + 0.5) % grid.dx
pts = pts[np.abs(fx - fy) > 1e-9]
direct = tw.direct_locate_batch(grid, pts)
starts = rng.integers(0, mesh.n_triangles, len(pts)).astype(np.int32)
walked = tw.locate_batch(mesh, starts, pts)
print(f"direct vs walk on {len(pts)} off-diagonal queries: "
      f"{int((direct.triangles != walked.triangles).sum())} disagreements")

# one advection horizon of characteristic feet, both locators
field = tw.VectorField.rotating(2 * math.pi, 2 * math.pi)
alpha = 5.0
dt = alpha * grid.dx
steps = max(1, math.ceil(1.0 / dt - 1e-12))

ctx = tw.WalkContext.create(mesh, seed=1, with_tree=False)
t_walk = t_direct = 0.0
for n in range(steps):
    feet = tw.euler_feet(mesh, field, n, dt)
    t0 = time.perf_counter()
    tw.point_location_bw(mesh, ctx, feet, "b")
    t1 = time.perf_counter()
    tw.direct_locate_batch(grid, feet)
    t2 = time.perf_counter()
    t_walk += t1 - t0
    t_direct += t2 - t1

print(f"\nfeet workload, {steps} steps of {mesh.n_vertices} queries:")
print(f"  walk strategy B: {1e3 * t_walk / steps:7.2f} ms/step")
print(f"  direct formulas: {1e3 * t_direct / steps:7.2f} ms/step")
print("\n(locator storage: walk-b "
      f"{tw.walk_storage_bytes(mesh, 'b') / 1e6:.2f} MB for the neighbor "
      "and start lists; the direct formulas store nothing)")
