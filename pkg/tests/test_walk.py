import numpy as np
import pytest

import triwalk as tw
from triwalk import MeshError, Status, WalkStrategy

from .conftest import delaunay_mesh
from .helpers import BruteForceOracle, flip_edge, reference_sweep


class TestWalkFrom:
    def test_inside_start_zero_steps(self, square2):
        res = tw.walk_from(square2, 0, (0.2, 0.1))
        assert res.status is Status.INSIDE
        assert res.steps == 0
        assert res.triangle == 0

    def test_one_change_across_shared_edge(self, square2):
        res = tw.walk_from(square2, 0, (2 / 3, 2 / 3))
        assert res.triangle == 1
        assert res.steps == 1
        np.testing.assert_allclose(res.coords, 1 / 3, atol=1e-14)

    def test_outside_through_boundary(self, square2):
        res = tw.walk_from(square2, 1, (-1.0, 0.5))
        assert res.status is Status.OUTSIDE
        assert not res.fallback

    def test_matches_batch_kernel(self):
        mesh = delaunay_mesh(400, seed=2)
        rng = np.random.default_rng(3)
        pts = rng.uniform(-0.55, 0.55, size=(300, 2))
        starts = rng.integers(0, mesh.n_triangles, 300).astype(np.int32)
        batch = tw.locate_batch(mesh, starts, pts)
        for i in range(len(pts)):
            ref = tw.walk_from(mesh, int(starts[i]), pts[i])
            assert batch.triangles[i] == ref.triangle
            assert batch.steps[i] == ref.steps
            assert batch.inside[i] == (ref.status is Status.INSIDE)
            np.testing.assert_array_equal(batch.coords[i], ref.coords)

    def test_any_start_finds_unique_container(self):
        mesh = delaunay_mesh(800, seed=5)
        oracle = BruteForceOracle(mesh)
        rng = np.random.default_rng(8)
        pts = rng.uniform(-0.5, 0.5, size=(200, 2))
        counts, first = oracle.scan(pts)
        starts = rng.integers(0, mesh.n_triangles, 200).astype(np.int32)
        batch = tw.locate_batch(mesh, starts, pts)
        for i in range(200):
            if counts[i] == 1:
                assert batch.inside[i]
                assert batch.triangles[i] == first[i]
            elif counts[i] > 1:
                assert oracle.accepts(int(batch.triangles[i]), pts[i])
        assert not batch.fallback.any()

    def test_interpolation_ready_coords(self):
        mesh = delaunay_mesh(400, seed=2)
        rng = np.random.default_rng(1)
        pts = rng.uniform(-0.4, 0.4, size=(100, 2))
        starts = np.zeros(100, dtype=np.int32)
        batch = tw.locate_batch(mesh, starts, pts)
        tv = mesh.vertices[mesh.triangles[batch.triangles]]
        rebuilt = np.einsum("ij,ijk->ik", batch.coords, tv)
        err = np.linalg.norm(rebuilt - pts, axis=1)
        assert err[batch.inside].max() < 1e-12 * mesh.space_scale


class TestFallback:
    def test_synthetic_cycle_engages_fallback(self, square2):
        # corrupt the adjacency into a self-loop: the walk ping-pongs on
        # triangle 0 until the step cap, then the exhaustive scan answers
        nb = square2.neighbors.copy()
        nb[0, 0] = 0
        broken = tw.Triangulation(square2.vertices, square2.triangles, nb,
                                  square2.space_scale)
        target = (2 / 3, 2 / 3)                    # centroid of triangle 1
        res = tw.walk_from(broken, 0, target)
        assert res.fallback
        assert res.status is Status.INSIDE
        assert res.triangle == 1
        batch = tw.locate_batch(broken, np.zeros(1, np.int32), [target])
        assert batch.fallback[0]
        assert batch.triangles[0] == 1

    def test_fallback_outside_query(self, square2):
        nb = square2.neighbors.copy()
        nb[0, 0] = 0
        broken = tw.Triangulation(square2.vertices, square2.triangles, nb,
                                  square2.space_scale)
        res = tw.walk_from(broken, 0, (5.0, 5.0))
        assert res.fallback
        assert res.status is Status.OUTSIDE

    def test_flipped_edge_mesh_still_oracle_correct(self):
        mesh = delaunay_mesh(300, seed=17)
        flipped = None
        for j in range(mesh.n_triangles):
            for k in range(3):
                flipped = flip_edge(mesh, j, k)
                if flipped is not None:
                    break
            if flipped is not None:
                break
        assert flipped is not None
        oracle = BruteForceOracle(flipped)
        rng = np.random.default_rng(4)
        pts = rng.uniform(-0.5, 0.5, size=(400, 2))
        counts, first = oracle.scan(pts)
        starts = rng.integers(0, flipped.n_triangles, 400).astype(np.int32)
        batch = tw.locate_batch(flipped, starts, pts)
        for i in range(400):
            if counts[i] == 1:
                assert batch.triangles[i] == first[i]


class TestSweep:
    @pytest.mark.parametrize("strategy", ["a", "b", "c"])
    def test_matches_reference(self, strategy):
        mesh = delaunay_mesh(300, seed=17)
        rng = np.random.default_rng(9)
        queries = mesh.vertices + rng.normal(scale=0.02,
                                             size=mesh.vertices.shape)
        ctx = tw.WalkContext.create(mesh, seed=1)
        ref_t0 = ctx.initial_triangles.copy()
        tri, coords, steps, inside, starts = reference_sweep(
            mesh, ref_t0, queries, strategy, ctx.parents, ctx.order)

        batch, stats = tw.point_location_bw(mesh, ctx, queries, strategy)
        np.testing.assert_array_equal(batch.triangles, tri)
        np.testing.assert_array_equal(batch.steps, steps)
        np.testing.assert_array_equal(batch.inside, inside)
        np.testing.assert_array_equal(batch.coords, coords)
        np.testing.assert_array_equal(ctx.initial_triangles, ref_t0)
        assert stats.n_inside == int(inside.sum())
        assert stats.n_outside == int((~inside).sum())

    def test_strategy_a_never_overwrites(self, square2):
        ctx = tw.WalkContext.create(square2, seed=0, with_tree=False)
        before = ctx.initial_triangles.copy()
        queries = square2.vertices * 0.9 + 0.05
        tw.point_location_bw(square2, ctx, queries, "a")
        np.testing.assert_array_equal(ctx.initial_triangles, before)

    def test_strategy_b_adopts_found_triangles(self):
        mesh = delaunay_mesh(300, seed=17)
        ctx = tw.WalkContext.create(mesh, seed=1, with_tree=False)
        queries = mesh.vertices.copy()
        batch, _ = tw.point_location_bw(mesh, ctx, queries, "b")
        np.testing.assert_array_equal(
            ctx.initial_triangles[batch.inside],
            batch.triangles[batch.inside])

    def test_strategy_b_second_identical_sweep_is_free(self):
        mesh = delaunay_mesh(300, seed=17)
        rng = np.random.default_rng(2)
        queries = mesh.vertices + rng.normal(scale=0.01,
                                             size=mesh.vertices.shape)
        ctx = tw.WalkContext.create(mesh, seed=1, with_tree=False)
        tw.point_location_bw(mesh, ctx, queries, "b")
        _, stats = tw.point_location_bw(mesh, ctx, queries, "b")
        assert stats.total_changes == 0

    def test_strategy_c_starts_from_parent_final(self, square2):
        ctx = tw.WalkContext.create(square2, seed=0)
        queries = square2.vertices * 0.9 + 0.05
        t0 = ctx.initial_triangles.copy()
        tri, _, _, inside, starts = reference_sweep(
            square2, t0, queries, "c", ctx.parents, ctx.order)
        root = ctx.order[0]
        for i in range(square2.n_vertices):
            if i == root:
                continue
            parent = ctx.parents[i]
            pos = {int(n): k for k, n in enumerate(ctx.order)}
            assert pos[int(parent)] < pos[i]
            if inside[parent]:
                assert starts[i] == tri[parent]

    def test_strategy_c_requires_tree(self, square2):
        ctx = tw.WalkContext.create(square2, seed=0, with_tree=False)
        with pytest.raises(MeshError, match="spanning tree"):
            tw.point_location_bw(square2, ctx, square2.vertices, "c")

    def test_node_coordinate_queries_touch_own_vertex(self):
        # a vertex query yields an exact (1, 0, 0) coordinate pattern in
        # its own incident start triangle, so no element change at all;
        # the ~1.5 plateau only appears at small nonzero distances
        mesh = delaunay_mesh(300, seed=17)
        ctx = tw.WalkContext.create(mesh, seed=1, with_tree=False)
        batch, stats = tw.point_location_bw(mesh, ctx, mesh.vertices, "a")
        assert batch.inside.all()
        for i in range(mesh.n_vertices):
            assert i in mesh.triangles[batch.triangles[i]]
        assert stats.mean_changes == 0.0

    def test_outside_keeps_t0(self):
        mesh = delaunay_mesh(300, seed=17)
        ctx = tw.WalkContext.create(mesh, seed=1, with_tree=False)
        before = ctx.initial_triangles.copy()
        queries = np.full((mesh.n_vertices, 2), 2.0)   # all outside
        batch, stats = tw.point_location_bw(mesh, ctx, queries, "b")
        assert not batch.inside.any()
        assert stats.n_outside == mesh.n_vertices
        np.testing.assert_array_equal(ctx.initial_triangles, before)

    def test_parallel_matches_serial(self):
        mesh = delaunay_mesh(300, seed=17)
        rng = np.random.default_rng(6)
        queries = mesh.vertices + rng.normal(scale=0.02,
                                             size=mesh.vertices.shape)
        for strategy in ("a", "b"):
            ctx_s = tw.WalkContext.create(mesh, seed=1, with_tree=False)
            ctx_p = tw.WalkContext.create(mesh, seed=1, with_tree=False)
            bs, _ = tw.point_location_bw(mesh, ctx_s, queries, strategy)
            bp, _ = tw.point_location_bw(mesh, ctx_p, queries, strategy,
                                         parallel=True)
            np.testing.assert_array_equal(bs.triangles, bp.triangles)
            np.testing.assert_array_equal(bs.steps, bp.steps)
            np.testing.assert_array_equal(ctx_s.initial_triangles,
                                          ctx_p.initial_triangles)


class TestStorage:
    def test_single_triangle_strategy_a(self, single_triangle):
        assert tw.walk_storage_bytes(single_triangle, "a") == 24

    def test_c_adds_4n_over_b(self):
        mesh = delaunay_mesh(300, seed=17)
        diff = (tw.walk_storage_bytes(mesh, WalkStrategy.C)
                - tw.walk_storage_bytes(mesh, WalkStrategy.B))
        assert diff == 4 * mesh.n_vertices

    def test_a_equals_b(self):
        mesh = delaunay_mesh(300, seed=17)
        assert (tw.walk_storage_bytes(mesh, "a")
                == tw.walk_storage_bytes(mesh, "b"))

    def test_mesh_bytes(self, single_triangle):
        assert tw.mesh_storage_bytes(single_triangle) == 3 * 16 + 12
