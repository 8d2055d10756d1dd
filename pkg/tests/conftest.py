import numpy as np
import pytest

import triwalk as tw
from triwalk import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    _kernels.warm_up()


@pytest.fixture
def square2():
    """Two triangles tiling the unit square: (0,1,3) and (1,2,3)."""
    return tw.build_triangulation([(0, 0), (1, 0), (1, 1), (0, 1)],
                                  [(0, 1, 3), (1, 2, 3)])


@pytest.fixture
def single_triangle():
    return tw.build_triangulation([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])


_MESH_CACHE = {}


def delaunay_mesh(n, seed=11):
    """Session-cached random Delaunay meshes (they are immutable)."""
    key = (n, seed)
    if key not in _MESH_CACHE:
        _MESH_CACHE[key] = tw.generate_random_delaunay(n, seed)
    return _MESH_CACHE[key]


_TREE_CACHE = {}


def quadtree_for(mesh, q=7):
    key = (id(mesh), q)
    if key not in _TREE_CACHE:
        _TREE_CACHE[key] = tw.build_quadtree(mesh, q)
    return _TREE_CACHE[key]


@pytest.fixture
def desk_mesh():
    return delaunay_mesh(20000, seed=3)


@pytest.fixture
def small_mesh():
    return delaunay_mesh(300, seed=17)
