"""How the quadtree's leaf bound q shapes depth, size and query work.

Sweeps q over a fixed mesh and mesh size over a fixed q. Two effects to
look for: the tree depth saturates once q reaches the typical number of
triangles around a vertex (~7 on a Delaunay mesh), and both the quad
count and the stored triangle indices stay linear in the mesh size,
which is what the fixed 4/8/8-byte storage model turns into bytes.

Run: python3 demos/02_quadtree_depth_storage.py
"""

import numpy as np

import triwalk as tw

mesh = tw.generate_random_delaunay(20000, seed=7)
rng = np.random.default_rng(1)
queries = rng.uniform(-0.5, 0.5, size=(5000, 2))

print(f"mesh: N={mesh.n_vertices}, N_t={mesh.n_triangles}\n")
print(f"{'q':>3} {'depth':>5} {'quads':>8} {'tri idx':>9} "
      f"{'storage MB':>10} {'mean tests/query':>16}")
for q in (2, 3, 5, 7, 10, 14):
    tree = tw.build_quadtree(mesh, q=q)
    batch, visits, tests = tw.qt_locate_batch(tree, queries, mesh)
    mb = tw.qt_storage_bytes(tree) / 1e6
    print(f"{q:>3} {tw.qt_depth(tree):>5} {tree.node_count:>8} "
          f"{tree.leaf_triangle_index_count:>9} {mb:>10.2f} "
          f"{tests[batch.inside].mean():>16.2f}")

print("\nmesh-size sweep at q=7 (walk storage shown for comparison):")
print(f"{'N':>7} {'quads/N':>8} {'tri idx/N':>9} {'qt MB':>7} "
      f"{'walk-c MB':>9} {'ratio':>6}")
for n in (2000, 8000, 32000):
    m = tw.generate_random_delaunay(n, seed=7)
    tree = tw.build_quadtree(m, q=7)
    qt_mb = tw.qt_storage_bytes(tree) / 1e6
    walk_mb = tw.walk_storage_bytes(m, "c") / 1e6
    print(f"{m.n_vertices:>7} {tree.node_count / m.n_vertices:>8.2f} "
          f"{tree.leaf_triangle_index_count / m.n_vertices:>9.2f} "
          f"{qt_mb:>7.3f} {walk_mb:>9.3f} {qt_mb / walk_mb:>6.2f}")
