import numpy as np
import pytest
from shapely.geometry import Polygon, box

import triwalk as tw
from triwalk import QuadtreeError, Status

from .conftest import delaunay_mesh, quadtree_for
from .helpers import BruteForceOracle


def leaf_census(tree, mesh):
    """Per-leaf (rule, n_tris, n_verts) recomputed with shapely."""
    polys = [Polygon(mesh.vertices[t]) for t in mesh.triangles]
    out = []
    for node in tree.leaves():
        x0, x1, y0, y1 = tree.rects[node]
        rect = box(x0, y0, x1, y1)
        n_tris = sum(rect.intersects(p) for p in polys)
        vx, vy = mesh.vertices[:, 0], mesh.vertices[:, 1]
        n_verts = int(((vx >= x0) & (vx <= x1) & (vy >= y0) & (vy <= y1)).sum())
        stored = tree.leaf_triangles(node)
        out.append((node, n_tris, n_verts, stored))
    return out


class TestBuild:
    def test_single_triangle_q2_subdivides_on_vertices(self, single_triangle):
        tree = tw.build_quadtree(single_triangle, q=2)
        assert tw.qt_depth(tree) >= 1         # 3 vertices force a split
        for node, n_tris, n_verts, stored in leaf_census(tree,
                                                         single_triangle):
            assert n_verts <= 1

    def test_leaf_rules_exhaustive(self):
        mesh = delaunay_mesh(150, seed=12)
        tree = tw.build_quadtree(mesh, q=4)
        for node, n_tris, n_verts, stored in leaf_census(tree, mesh):
            rule_a = n_verts == 0 and 1 <= n_tris <= 4
            rule_b = n_verts == 1
            rule_c = n_tris == 0
            assert rule_a or rule_b or rule_c
            assert len(stored) == n_tris
            assert list(stored) == sorted(stored)

    def test_empty_quadrant_is_rule_c_leaf(self):
        # triangles confined to the lower-left of a wide bounding box
        verts = [(0, 0), (1, 0), (0, 1), (4, 0), (0, 4)]
        tris = [(0, 1, 2), (1, 3, 2)]
        mesh = tw.build_triangulation(np.asarray(verts, float), tris)
        tree = tw.build_quadtree(mesh, q=2)
        empties = [node for node, n_tris, _nv, stored
                   in leaf_census(tree, mesh)
                   if n_tris == 0 and len(stored) == 0]
        assert empties

    def test_covering_invariant(self):
        mesh = delaunay_mesh(150, seed=12)
        tree = tw.build_quadtree(mesh, q=4)
        assert set(np.unique(tree.tri_data)) == set(range(mesh.n_triangles))

    def test_children_partition_parent(self):
        mesh = delaunay_mesh(150, seed=12)
        tree = quadtree_for(mesh)
        for node in range(tree.node_count):
            kids = tree.children[node]
            if kids[0] < 0:
                continue
            x0, x1, y0, y1 = tree.rects[node]
            xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
            np.testing.assert_allclose(
                tree.rects[kids],
                [(x0, xm, y0, ym), (xm, x1, y0, ym),
                 (x0, xm, ym, y1), (xm, x1, ym, y1)])

    def test_q_below_two_rejected(self, single_triangle):
        with pytest.raises(ValueError):
            tw.build_quadtree(single_triangle, q=1)

    def test_duplicate_points_hit_depth_cap(self):
        verts = [(0, 0), (1, 0), (0, 1), (0, 0), (-1, 0), (0, -1)]
        tris = [(0, 1, 2), (3, 4, 5)]
        mesh = tw.build_triangulation(np.asarray(verts, float), tris)
        with pytest.raises(QuadtreeError, match="depth cap"):
            tw.build_quadtree(mesh, q=2)

    def test_depth_saturation_q7_q10(self):
        mesh = delaunay_mesh(4000, seed=11)
        d7 = tw.qt_depth(tw.build_quadtree(mesh, 7))
        d10 = tw.qt_depth(tw.build_quadtree(mesh, 10))
        assert abs(d7 - d10) <= 1

    def test_vertex_on_child_boundary_counted_both_sides(self):
        # courant vertices sit exactly on the split lines
        mesh = tw.generate_courant_mesh(2)
        tree = tw.build_quadtree(mesh, q=2)
        assert tw.validate(mesh).ok
        assert tree.node_count >= 5


class TestLocate:
    def test_outside_root_box_no_tests(self, single_triangle):
        tree = tw.build_quadtree(single_triangle, q=2)
        res = tw.qt_locate(tree, (5.0, 5.0), single_triangle)
        assert res.status is Status.OUTSIDE
        assert res.steps == 0

    def test_centroid_unique(self):
        mesh = delaunay_mesh(150, seed=12)
        tree = quadtree_for(mesh)
        tv = mesh.vertices[mesh.triangles]
        centroids = tv.mean(axis=1)
        for j in range(0, mesh.n_triangles, 7):
            res = tw.qt_locate(tree, centroids[j], mesh)
            assert res.triangle == j

    def test_scan_agreement_random_points(self):
        mesh = delaunay_mesh(800, seed=5)
        tree = quadtree_for(mesh)
        oracle = BruteForceOracle(mesh)
        rng = np.random.default_rng(21)
        pts = rng.uniform(-0.5, 0.5, size=(500, 2))
        counts, first = oracle.scan(pts)
        batch, visits, tests = tw.qt_locate_batch(tree, pts, mesh)
        for i in range(len(pts)):
            if counts[i] == 1:
                assert batch.triangles[i] == first[i]
            elif counts[i] > 1:
                assert oracle.accepts(int(batch.triangles[i]), pts[i])
            else:
                assert not batch.inside[i]
        assert (visits[batch.inside] >= 1).all()

    def test_batch_matches_scalar(self):
        mesh = delaunay_mesh(150, seed=12)
        tree = quadtree_for(mesh)
        rng = np.random.default_rng(2)
        pts = rng.uniform(-0.6, 0.6, size=(200, 2))
        batch, visits, tests = tw.qt_locate_batch(tree, pts, mesh)
        for i in range(len(pts)):
            res = tw.qt_locate(tree, pts[i], mesh)
            assert batch.triangles[i] == res.triangle
            assert batch.inside[i] == (res.status is Status.INSIDE)
            assert tests[i] == res.steps
            if res.status is Status.INSIDE:
                np.testing.assert_array_equal(batch.coords[i], res.coords)

    def test_inside_coords_tolerance(self):
        mesh = delaunay_mesh(150, seed=12)
        tree = quadtree_for(mesh)
        rng = np.random.default_rng(3)
        pts = rng.uniform(-0.5, 0.5, size=(300, 2))
        batch, _, _ = tw.qt_locate_batch(tree, pts, mesh)
        assert batch.coords[batch.inside].min() >= -1e-12


class TestStorage:
    def test_root_only_tree_formula(self):
        # a root that is itself a leaf costs 4 doubles + 4 pointers + its
        # triangle list; build_quadtree can never stop at the root of a
        # real mesh (>= 3 vertices), so assemble the degenerate tree directly
        tree = tw.Quadtree(children=np.full((1, 4), -1, np.int32),
                           rects=np.array([[0.0, 1.0, 0.0, 1.0]]),
                           tri_indptr=np.array([0, 1], np.int64),
                           tri_data=np.array([0], np.int32),
                           depths=np.zeros(1, np.int32), q=2,
                           max_depth_reached=0)
        assert tw.qt_storage_bytes(tree) == 4 * 8 + 4 * 8 + 4 * 1

    def test_storage_formula_on_real_tree(self):
        mesh = tw.build_triangulation([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
        tree = tw.build_quadtree(mesh, q=2)
        expect = tree.node_count * 64 + 4 * tree.leaf_triangle_index_count
        assert tw.qt_storage_bytes(tree) == expect

    def test_storage_monotone_in_subdivision(self):
        mesh = delaunay_mesh(800, seed=5)
        deep = tw.build_quadtree(mesh, q=2)
        shallow = quadtree_for(mesh, q=7)
        assert tw.qt_storage_bytes(deep) > tw.qt_storage_bytes(shallow)
        assert deep.node_count > shallow.node_count

    def test_vertex_lists_not_stored(self):
        mesh = delaunay_mesh(150, seed=12)
        tree = quadtree_for(mesh)
        # only triangle indices persist after construction
        assert tree.tri_data.dtype == np.int32
        assert not hasattr(tree, "vertex_data")
