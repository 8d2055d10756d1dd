"""Point location and semi-Lagrangian advection on 2-D triangular meshes.

The package compares three ways of finding the triangle containing a
query point — a quadtree index, barycentric walks with
characteristic-aware starting triangles, and direct location on a
structured grid — and plugs any of them into a basic semi-Lagrangian
advection scheme, with a benchmark harness that reports step counts,
depths, storage and CPU-load shares as CSV.
"""

from .mesh import (DOMAIN_MAX, DOMAIN_MIN, NO_NEIGHBOR, MeshError,
                   Triangulation, ValidationReport, assign_initial_triangles,
                   barycentric_coords, build_spanning_tree,
                   build_triangulation, generate_courant_mesh,
                   generate_random_delaunay, load_triangle_format,
                   read_triangle_mesh, triangle_format_text, validate,
                   write_triangle_mesh)
from .quadtree import (DEFAULT_Q, Quadtree, QuadtreeError, QuadtreeLocator,
                       build_quadtree, qt_depth, qt_locate, qt_locate_batch,
                       qt_storage_bytes)
from .structured import (StructuredGrid, StructuredLocator, direct_locate,
                         direct_locate_batch)
from .sl import (SLProfile, SLRun, SLState, VectorField, euler_feet,
                 eval_field, gaussian_bump, p1_interpolate, sl_advect)
from .walk import (BatchLocations, LocationResult, Status, StepStats,
                   WalkContext, WalkLocator, WalkStrategy, locate_batch,
                   mesh_storage_bytes, point_location_bw, walk_from,
                   walk_storage_bytes, WALK_TOL)
from .bench import (BenchConfig, BenchReport, ConfigError, bench_locate,
                    bench_sl_profile, bench_storage, make_locator)

__version__ = "0.1.0"

__all__ = [
    "BatchLocations", "BenchConfig", "BenchReport", "ConfigError",
    "DEFAULT_Q", "DOMAIN_MAX", "DOMAIN_MIN", "LocationResult", "MeshError",
    "NO_NEIGHBOR", "Quadtree", "QuadtreeError", "QuadtreeLocator",
    "SLProfile", "SLRun", "SLState", "Status", "StepStats", "StructuredGrid",
    "StructuredLocator", "Triangulation", "ValidationReport", "VectorField",
    "WALK_TOL", "WalkContext", "WalkLocator", "WalkStrategy",
    "assign_initial_triangles", "barycentric_coords", "bench_locate",
    "bench_sl_profile", "bench_storage", "build_quadtree",
    "build_spanning_tree", "build_triangulation", "direct_locate",
    "direct_locate_batch", "euler_feet", "eval_field",
    "generate_courant_mesh", "generate_random_delaunay", "gaussian_bump",
    "load_triangle_format", "locate_batch", "make_locator",
    "mesh_storage_bytes", "p1_interpolate", "point_location_bw", "qt_depth",
    "qt_locate", "qt_locate_batch", "qt_storage_bytes", "read_triangle_mesh",
    "sl_advect", "triangle_format_text", "validate", "walk_from",
    "walk_storage_bytes", "write_triangle_mesh",
]
