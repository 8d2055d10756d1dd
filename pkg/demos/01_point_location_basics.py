"""Locate points on an unstructured triangulation, three ways.

Builds a random Delaunay mesh of the unit square, then finds the
triangle containing a handful of query points with (a) the barycentric
walk from an arbitrary start, (b) the quadtree index, and (c) an
all-triangles scan used as the ground truth. All three must land in the
same triangle whenever the containing triangle is unique; the point is
how much work each one does to get there.

Run: python3 demos/01_point_location_basics.py
"""

import numpy as np

import triwalk as tw

mesh = tw.generate_random_delaunay(4000, seed=42)
print(f"mesh: {mesh.n_vertices} nodes, {mesh.n_triangles} triangles, "
      f"dx ~ {mesh.space_scale:.4f}")

tree = tw.build_quadtree(mesh, q=7)
print(f"quadtree: {tree.node_count} quads, depth {tw.qt_depth(tree)}, "
      f"{tree.leaf_triangle_index_count} stored triangle indices\n")

rng = np.random.default_rng(0)
queries = rng.uniform(-0.5, 0.5, size=(8, 2))
starts = rng.integers(0, mesh.n_triangles, size=8).astype(np.int32)

print(f"{'query':>22}  {'walk tri':>8} {'changes':>7}  "
      f"{'qt tri':>6} {'tests':>5}")
for p, s in zip(queries, starts):
    walked = tw.walk_from(mesh, int(s), p)
    via_tree = tw.qt_locate(tree, p, mesh)
    assert walked.triangle == via_tree.triangle
    print(f"({p[0]:+.3f}, {p[1]:+.3f})      {walked.triangle:>8} "
          f"{walked.steps:>7}  {via_tree.triangle:>6} {via_tree.steps:>5}")

# the walk cost scales with the start-to-query distance in cells: walk
# to the same point from a near start and from across the domain
target = np.array([0.21, -0.07])
near = tw.walk_from(mesh, tw.walk_from(mesh, 0, target).triangle, target)
far = tw.walk_from(mesh, int(starts[0]), target)
print(f"\nwalk to {target}: {near.steps} changes from the containing "
      f"triangle, {far.steps} from an arbitrary one")

# the returned barycentric coordinates are interpolation-ready
tv = mesh.vertices[mesh.triangles[far.triangle]]
print(f"coords {far.coords.round(6)} reconstruct the query to "
      f"{np.linalg.norm(far.coords @ tv - target):.2e}")
