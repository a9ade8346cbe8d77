import math

import numpy as np
import pytest
from shapely import MultiPoint
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from geodisk import Point2, make_polygon, triangulate, validate_polygon
from geodisk.errors import DegenerateRing, HoleOutsideOuter, HolesOverlap, SelfIntersection
from geodisk.geometry import boundary_points, contains, on_boundary, sample_points, visible
from shapes import ALL, FRAME, HEXAGON, L_SHAPE, SQUARE


def signed_area(ring):
    x, y = np.array(ring).T
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def test_unit_square_is_accepted_as_is():
    P = validate_polygon([[(0, 0), (1, 0), (1, 1), (0, 1)]])
    assert P.n == 4 and not P.has_holes
    assert P.outer == ((0, 0), (1, 0), (1, 1), (0, 1))


def test_clockwise_outer_ring_is_reoriented():
    P = validate_polygon([[(0, 0), (0, 1), (1, 1), (1, 0)]])
    assert signed_area(P.outer) > 0
    assert P.outer[0] == (0, 0)


def test_holes_come_out_clockwise():
    P = validate_polygon({"outer": [(0, 0), (4, 0), (4, 4), (0, 4)], "holes": [[(1, 1), (3, 1), (3, 3), (1, 3)]]})
    assert signed_area(P.holes[0]) < 0


def test_repeated_closing_vertex_is_dropped():
    assert validate_polygon([[(0, 0), (1, 0), (1, 1), (0, 0)]]).n == 3


def test_bow_tie_is_rejected():
    with pytest.raises((SelfIntersection, DegenerateRing)):
        validate_polygon([[(0, 0), (1, 1), (1, 0), (0, 1)]])


def test_crossing_pentagram_is_rejected():
    star = [(math.cos(4 * math.pi * i / 5), math.sin(4 * math.pi * i / 5)) for i in range(5)]
    with pytest.raises(SelfIntersection):
        validate_polygon([star])


@pytest.mark.parametrize(
    "ring",
    [[(0, 0), (1, 0)], [(0, 0), (1, 0), (2, 0)], [(0, 0), (1, 0), (1, 0), (0, 1)]],
)
def test_degenerate_rings(ring):
    with pytest.raises(DegenerateRing):
        validate_polygon([ring])


def test_hole_outside_outer():
    with pytest.raises(HoleOutsideOuter) as err:
        validate_polygon([[(0, 0), (1, 0), (1, 1), (0, 1)], [(2, 2), (3, 2), (3, 3)]])
    assert err.value.ring == 1


def test_hole_touching_outer_is_rejected():
    with pytest.raises(HoleOutsideOuter):
        validate_polygon([[(0, 0), (4, 0), (4, 4), (0, 4)], [(0, 1), (2, 1), (2, 2)]])


def test_overlapping_holes():
    outer = [(0, 0), (10, 0), (10, 10), (0, 10)]
    with pytest.raises(HolesOverlap):
        validate_polygon([outer, [(1, 1), (4, 1), (4, 4), (1, 4)], [(3, 3), (6, 3), (6, 6), (3, 6)]])


def test_point2_holds_plain_floats():
    p = Point2.of(np.array([1, 2]))
    assert type(p.x) is float and p == (1.0, 2.0)


@pytest.mark.parametrize("P, count", [(SQUARE, 2), (HEXAGON, 4), (FRAME, 8), (L_SHAPE, 4)])
def test_triangle_count(P, count):
    T = triangulate(P)
    assert len(T.triangles) == count == P.n + 2 * len(P.holes) - 2


@pytest.mark.parametrize("name", sorted(ALL))
def test_triangulation_partitions_the_polygon(name):
    P = ALL[name]
    T = triangulate(P)
    V = P.vertices
    areas = [signed_area(V[list(t)]) for t in T.triangles]
    assert min(areas) > 0
    assert sum(areas) == pytest.approx(P.area, rel=1e-12)
    for i, nbrs in T.adjacency.items():
        for j in nbrs:
            assert len(set(T.triangles[i]) & set(T.triangles[j])) == 2
            assert i in T.adjacency[j]


def test_contains_is_closed():
    Q = np.array([(0.5, 0.5), (0, 0), (1, 0.5), (1.0001, 0.5), (2, 2)])
    assert contains(SQUARE, Q).tolist() == [True, True, True, False, False]
    assert contains(FRAME, np.array([(2, 2), (0.5, 0.5), (1, 2)])).tolist() == [False, True, True]


def test_on_boundary():
    assert on_boundary(L_SHAPE, np.array([(1, 1.5), (1.5, 1.5), (0.5, 0.5)])).tolist() == [True, False, False]


def test_visibility_allows_touching_the_boundary():
    S = np.array([(2, 0.5), (2, 0.5), (0, 0), (2, 1)])
    T = np.array([(0.5, 2), (0.5, 0.5), (1, 1), (0, 2)])
    assert visible(L_SHAPE, S, T).tolist() == [False, True, True, False]


def test_visibility_through_a_hole_is_blocked():
    assert not visible(FRAME, np.array([(0.5, 2)]), np.array([(3.5, 2)]))[0]
    # along the hole's edge is fine
    assert visible(FRAME, np.array([(1, 0.5)]), np.array([(1, 3.5)]))[0]


def test_boundary_points_spacing():
    B = boundary_points(SQUARE, 0.1)
    assert len(B) == 40
    assert on_boundary(SQUARE, B).all()


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_samples_lie_inside(seed):
    for P in (L_SHAPE, FRAME):
        X = sample_points(P, 50, np.random.default_rng(seed))
        assert contains(P, X).all()


@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(-5, 5)), min_size=3, max_size=12, unique=True))
@settings(max_examples=60, deadline=None)
def test_convex_hulls_validate(points):
    hull = MultiPoint(points).convex_hull
    if hull.geom_type != "Polygon" or hull.area < 1e-3:
        return
    ring = list(hull.exterior.coords)[:-1]
    edges = np.diff(np.array(ring + ring[:1]), axis=0)
    assume(np.hypot(*edges.T).min() > 1e-6)
    P = make_polygon(ring)
    assert P.area == pytest.approx(hull.area, rel=1e-9)
    assert not P.reflex.any()
