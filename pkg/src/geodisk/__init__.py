"""Packing and covering polygons with geodesic disks."""

from .covering import (
    CandidateSet,
    PlacementResult,
    candidate_set,
    covering_radius,
    farthest_candidate,
    gonzalez_placement,
    k_cover,
    k_pack,
)
from .disk import (
    Arc,
    ArrangementBoundary,
    BoundarySegment,
    DiskBoundary,
    GeodesicDisk,
    boundary_intersections,
    disk_boundary,
    disk_contains,
    disk_region,
    update_arrangement,
)
from .engine import (
    GeodesicEngine,
    GeodesicPath,
    ShortestPathMap,
    ShortestPathTree,
    VisibilityGraph,
    diametral_pair,
    farthest_point_from_set,
    geodesic_distance,
    shortest_path,
    shortest_path_map,
    shortest_path_tree,
    visibility_graph,
)
from .errors import *  # noqa: F401,F403
from .estimators import GreedyDiskPacking, KCenterCover, KDiskPacking, TwoDiskCover, check_points, check_polygon
from .geometry import EPS, Point2, Polygon, make_polygon, triangulate, validate_polygon
from .io import RunRecord, load_polygon, render_svg
from .oracle import (
    GridGraph,
    PropertyReport,
    brute_force_k_cover,
    brute_force_k_pack_radius,
    brute_force_two_cover,
    grid_distance,
    property_suites,
    sampled_coverage_gap,
)
from .packing import PackingResult, brute_force_max_packing, greedy_packing, greedy_unit_packing, verify_packing
from .two_cover import (
    CircleArrangement,
    TwoCoverWitness,
    cover_uncovered_edges,
    geodesic_circle_arrangement,
    min_two_cover,
    test_two_disk_cover,
    uncovered_edges,
    verify_two_cover,
)

__version__ = "0.1.0"
