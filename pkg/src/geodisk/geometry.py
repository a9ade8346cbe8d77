"""Polygon representation, validation, triangulation and vectorized predicates.

All predicates treat the polygon as a closed set: points on the boundary are
inside, and a segment that grazes the boundary (touching a vertex or running
along an edge) still counts as lying in the polygon.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
import shapely
from shapely.geometry import Polygon as ShapelyPolygon

from .errors import (
    DegenerateRing,
    HoleOutsideOuter,
    HolesOverlap,
    SelfIntersection,
)

#: Absolute tolerance for incidence and visibility predicates. Coordinates are
#: assumed to be of order 1 to 1e3.
EPS = 1e-9

_CHUNK = 4096


class Point2(NamedTuple):
    x: float
    y: float

    @classmethod
    def of(cls, p) -> "Point2":
        return cls(float(p[0]), float(p[1]))


def as_points(points) -> np.ndarray:
    """Coerce a point, list of points or array to a float array of shape (m, 2)."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected points of shape (m, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("points must have finite coordinates")
    return arr


def _signed_area(ring) -> float:
    xy = np.asarray(ring, dtype=float)
    x, y = xy[:, 0], xy[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class Polygon:
    """A polygon with an outer ring (counterclockwise) and holes (clockwise).

    Vertices are numbered ring by ring: the outer ring first, then each hole.
    Edge ``i`` runs from vertex ``i`` to ``next_index[i]``.
    """

    outer: tuple
    holes: tuple = ()

    @property
    def n(self) -> int:
        return len(self.outer) + sum(len(h) for h in self.holes)

    @property
    def rings(self) -> tuple:
        return (self.outer,) + tuple(self.holes)

    @property
    def has_holes(self) -> bool:
        return len(self.holes) > 0

    @cached_property
    def vertices(self) -> np.ndarray:
        v = np.array([p for ring in self.rings for p in ring], dtype=float)
        v.setflags(write=False)
        return v

    @cached_property
    def ring_index(self) -> np.ndarray:
        return np.concatenate([np.full(len(r), i) for i, r in enumerate(self.rings)])

    @cached_property
    def next_index(self) -> np.ndarray:
        out, start = [], 0
        for ring in self.rings:
            m = len(ring)
            out.extend(start + (np.arange(m) + 1) % m)
            start += m
        return np.array(out, dtype=int)

    @cached_property
    def prev_index(self) -> np.ndarray:
        prev = np.empty(self.n, dtype=int)
        prev[self.next_index] = np.arange(self.n)
        return prev

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge start and end points, each of shape (n, 2)."""
        v = self.vertices
        return v, v[self.next_index]

    @cached_property
    def reflex(self) -> np.ndarray:
        """Boolean mask of vertices whose interior angle exceeds pi."""
        v = self.vertices
        a = v[self.prev_index]
        c = v[self.next_index]
        cross = (v[:, 0] - a[:, 0]) * (c[:, 1] - v[:, 1]) - (v[:, 1] - a[:, 1]) * (c[:, 0] - v[:, 0])
        return cross < -EPS * np.hypot(*(v - a).T) * np.hypot(*(c - v).T)

    @property
    def convex(self) -> np.ndarray:
        return ~self.reflex

    @cached_property
    def shape(self) -> ShapelyPolygon:
        return ShapelyPolygon(self.outer, [list(h) for h in self.holes])

    @property
    def area(self) -> float:
        return float(self.shape.area)

    @cached_property
    def bounds(self) -> tuple[float, float, float, float]:
        v = np.asarray(self.outer, dtype=float)
        return float(v[:, 0].min()), float(v[:, 1].min()), float(v[:, 0].max()), float(v[:, 1].max())

    @property
    def bbox_diagonal(self) -> float:
        x0, y0, x1, y1 = self.bounds
        return float(np.hypot(x1 - x0, y1 - y0))

    def to_dict(self) -> dict:
        return {
            "outer": [list(p) for p in self.outer],
            "holes": [[list(p) for p in h] for h in self.holes],
        }

    def scaled(self, s: float) -> "Polygon":
        return Polygon(
            tuple((x * s, y * s) for x, y in self.outer),
            tuple(tuple((x * s, y * s) for x, y in h) for h in self.holes),
        )

    def __repr__(self):
        return f"Polygon(n={self.n}, holes={len(self.holes)})"


# --------------------------------------------------------------------------
# validation


def _segments_cross(p1, p2, q1, q2, eps=EPS) -> bool:
    """True if closed segments p1p2 and q1q2 share a point."""

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) <= eps else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return min(a[0], b[0]) - eps <= c[0] <= max(a[0], b[0]) + eps and min(a[1], b[1]) - eps <= c[1] <= max(
            a[1], b[1]
        ) + eps

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    if o1 == 0 and on_seg(p1, p2, q1):
        return True
    if o2 == 0 and on_seg(p1, p2, q2):
        return True
    if o3 == 0 and on_seg(q1, q2, p1):
        return True
    if o4 == 0 and on_seg(q1, q2, p2):
        return True
    return False


def _check_ring(ring, idx):
    m = len(ring)
    if m < 3:
        raise DegenerateRing("ring needs at least 3 vertices", ring=idx)
    for i in range(m):
        if np.hypot(ring[i][0] - ring[(i + 1) % m][0], ring[i][1] - ring[(i + 1) % m][1]) <= EPS:
            raise DegenerateRing(f"consecutive vertices {i} and {(i + 1) % m} coincide", ring=idx)
    if abs(_signed_area(ring)) <= EPS:
        raise DegenerateRing("ring has zero area", ring=idx)
    for i in range(m):
        a, b = ring[i], ring[(i + 1) % m]
        for j in range(i + 1, m):
            if j == i or (j + 1) % m == i or j == (i + 1) % m:
                continue
            if _segments_cross(a, b, ring[j], ring[(j + 1) % m]):
                raise SelfIntersection(f"edges {i} and {j} intersect", ring=idx)


def _rings_touch(r1, r2) -> bool:
    for i in range(len(r1)):
        for j in range(len(r2)):
            if _segments_cross(r1[i], r1[(i + 1) % len(r1)], r2[j], r2[(j + 1) % len(r2)]):
                return True
    return False


def validate_polygon(rings) -> Polygon:
    """Build a :class:`Polygon` from raw coordinate rings.

    ``rings`` is either a sequence whose first element is the outer ring and
    the rest are holes, or a mapping with ``outer`` and ``holes`` keys. Rings
    may be given in either orientation, with or without a repeated closing
    vertex; they are normalized to outer counterclockwise, holes clockwise.
    """
    if isinstance(rings, Polygon):
        rings = rings.rings
    elif isinstance(rings, dict):
        rings = [rings["outer"], *rings.get("holes", [])]
    rings = list(rings)
    if not rings:
        raise DegenerateRing("no rings given", ring=0)

    clean = []
    for idx, ring in enumerate(rings):
        pts = [(float(x), float(y)) for x, y in ring]
        if len(pts) > 1 and pts[0] == pts[-1]:
            pts = pts[:-1]
        if not all(np.isfinite(c) for p in pts for c in p):
            raise DegenerateRing("non-finite coordinate", ring=idx)
        _check_ring(pts, idx)
        want_ccw = idx == 0
        if (_signed_area(pts) > 0) != want_ccw:
            pts = [pts[0]] + pts[:0:-1]
        clean.append(tuple(pts))

    outer = ShapelyPolygon(clean[0])
    for idx, hole in enumerate(clean[1:], start=1):
        if not outer.contains(ShapelyPolygon(hole)) or _rings_touch(clean[0], hole):
            raise HoleOutsideOuter("hole is not strictly inside the outer ring", ring=idx)
    for i in range(1, len(clean)):
        for j in range(i + 1, len(clean)):
            if ShapelyPolygon(clean[i]).intersects(ShapelyPolygon(clean[j])):
                raise HolesOverlap(f"hole overlaps hole {j}", ring=i)
    return Polygon(clean[0], tuple(clean[1:]))


# --------------------------------------------------------------------------
# triangulation


@dataclass(frozen=True)
class Triangulation:
    triangles: np.ndarray  # (t, 3) vertex indices, counterclockwise
    adjacency: dict  # triangle index -> tuple of neighbour triangle indices

    def __len__(self):
        return len(self.triangles)


def triangulate(P: Polygon) -> Triangulation:
    """Constrained triangulation of ``P`` using only its vertices."""
    tris_geom = shapely.constrained_delaunay_triangles(P.shape)
    lookup = {tuple(p): i for i, p in enumerate(P.vertices.tolist())}
    tris = []
    for g in shapely.get_parts(tris_geom):
        coords = [tuple(c) for c in np.asarray(g.exterior.coords)[:3].tolist()]
        idx = [lookup[c] for c in coords]
        a, b, c = P.vertices[idx]
        if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) < 0:
            idx = [idx[0], idx[2], idx[1]]
        tris.append(idx)
    tris = np.array(tris, dtype=int).reshape(-1, 3)

    edge_owner: dict = {}
    for t, (a, b, c) in enumerate(tris):
        for e in ((a, b), (b, c), (c, a)):
            edge_owner.setdefault(frozenset(e), []).append(t)
    adjacency = {t: [] for t in range(len(tris))}
    for owners in edge_owner.values():
        if len(owners) == 2:
            s, t = owners
            adjacency[s].append(t)
            adjacency[t].append(s)
    return Triangulation(tris, {k: tuple(v) for k, v in adjacency.items()})


def sample_points(P: Polygon, m: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform random points in ``P`` via area-weighted triangle sampling."""
    tri = triangulate(P).triangles
    v = P.vertices
    a, b, c = v[tri[:, 0]], v[tri[:, 1]], v[tri[:, 2]]
    areas = 0.5 * np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    pick = rng.choice(len(tri), size=m, p=areas / areas.sum())
    u, w = rng.random(m), rng.random(m)
    flip = u + w > 1
    u[flip], w[flip] = 1 - u[flip], 1 - w[flip]
    return a[pick] + u[:, None] * (b[pick] - a[pick]) + w[:, None] * (c[pick] - a[pick])


def boundary_points(P: Polygon, step: float) -> np.ndarray:
    """Points along every edge at spacing at most ``step``, vertices included."""
    a, b = P.edges
    out = []
    for p, q in zip(a, b):
        k = max(1, int(np.ceil(np.hypot(*(q - p)) / step)))
        t = np.arange(k)[:, None] / k
        out.append(p + t * (q - p))
    return np.vstack(out)


# --------------------------------------------------------------------------
# vectorized predicates


def _point_segment_distance(Q: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Distances (m, n) from each point in Q to each segment A[j]B[j]."""
    d = B - A
    L2 = np.maximum((d**2).sum(1), 1e-300)
    rel = Q[:, None, :] - A[None, :, :]
    t = np.clip((rel * d[None]).sum(2) / L2[None], 0.0, 1.0)
    proj = A[None] + t[..., None] * d[None]
    return np.hypot(Q[:, None, 0] - proj[..., 0], Q[:, None, 1] - proj[..., 1])


def on_boundary(P: Polygon, Q, eps: float = EPS) -> np.ndarray:
    Q = as_points(Q)
    A, B = P.edges
    out = np.empty(len(Q), dtype=bool)
    for s in range(0, len(Q), _CHUNK):
        out[s : s + _CHUNK] = (_point_segment_distance(Q[s : s + _CHUNK], A, B) <= eps).any(1)
    return out


def contains(P: Polygon, Q, eps: float = EPS) -> np.ndarray:
    """Closed point-in-polygon test for each row of ``Q``."""
    Q = as_points(Q)
    A, B = P.edges
    out = np.empty(len(Q), dtype=bool)
    for s in range(0, len(Q), _CHUNK):
        q = Q[s : s + _CHUNK]
        x, y = q[:, 0:1], q[:, 1:2]
        ay, by = A[None, :, 1], B[None, :, 1]
        straddle = (ay > y) != (by > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = A[None, :, 0] + (y - ay) * (B[None, :, 0] - A[None, :, 0]) / (by - ay)
        inside = (np.sum(straddle & (x < xint), axis=1) % 2) == 1
        bd = (_point_segment_distance(q, A, B) <= eps).any(1)
        out[s : s + _CHUNK] = inside | bd
    return out


def _visible_chunk(P: Polygon, S: np.ndarray, T: np.ndarray, eps: float) -> np.ndarray:
    A, B = P.edges
    m = len(S)
    d = T - S
    L = np.hypot(d[:, 0], d[:, 1])
    short = L <= eps
    Ls = np.where(short, 1.0, L)
    e = B - A
    Le = np.hypot(e[:, 0], e[:, 1])

    def cross(ux, uy, vx, vy):
        return ux * vy - uy * vx

    # signed distances of segment endpoints to edge lines and vice versa
    o1 = cross(e[None, :, 0], e[None, :, 1], S[:, None, 0] - A[None, :, 0], S[:, None, 1] - A[None, :, 1]) / Le
    o2 = cross(e[None, :, 0], e[None, :, 1], T[:, None, 0] - A[None, :, 0], T[:, None, 1] - A[None, :, 1]) / Le
    o3 = cross(d[:, None, 0], d[:, None, 1], A[None, :, 0] - S[:, None, 0], A[None, :, 1] - S[:, None, 1]) / Ls[:, None]
    o4 = cross(d[:, None, 0], d[:, None, 1], B[None, :, 0] - S[:, None, 0], B[None, :, 1] - S[:, None, 1]) / Ls[:, None]
    proper = (
        (np.abs(o1) > eps)
        & (np.abs(o2) > eps)
        & (np.abs(o3) > eps)
        & (np.abs(o4) > eps)
        & (np.sign(o1) != np.sign(o2))
        & (np.sign(o3) != np.sign(o4))
    )
    blocked = proper.any(1)

    # vertices touching the open segment split it into pieces; every piece's
    # midpoint must be inside the closed polygon
    V = P.vertices
    t = ((V[None, :, 0] - S[:, None, 0]) * d[:, None, 0] + (V[None, :, 1] - S[:, None, 1]) * d[:, None, 1]) / (
        Ls[:, None] ** 2
    )
    off = np.abs(cross(d[:, None, 0], d[:, None, 1], V[None, :, 0] - S[:, None, 0], V[None, :, 1] - S[:, None, 1])) / Ls[
        :, None
    ]
    tol_t = eps / Ls[:, None]
    touch = (off <= eps) & (t > tol_t) & (t < 1 - tol_t)
    touch[short] = False

    mids_pts = [S + 0.5 * d]
    owners = [np.arange(m)]
    rows = np.nonzero(touch.any(1) & ~blocked)[0]
    for r in rows:
        ts = np.concatenate(([0.0], np.sort(t[r, touch[r]]), [1.0]))
        mid = 0.5 * (ts[:-1] + ts[1:])
        mids_pts.append(S[r] + mid[:, None] * d[r])
        owners.append(np.full(len(mid), r))
    mids = np.vstack(mids_pts)
    own = np.concatenate(owners)
    ok = contains(P, mids, eps)
    bad = np.zeros(m, dtype=bool)
    np.logical_or.at(bad, own, ~ok)
    vis = ~blocked & ~bad
    vis[short] = True
    return vis


def visible(P: Polygon, S, T, eps: float = EPS) -> np.ndarray:
    """Row-wise test whether the closed segment S[i]T[i] lies in ``P``.

    Endpoints are assumed to be inside ``P``.
    """
    S, T = as_points(S), as_points(T)
    if len(S) == 1 and len(T) > 1:
        S = np.repeat(S, len(T), axis=0)
    if len(T) == 1 and len(S) > 1:
        T = np.repeat(T, len(S), axis=0)
    out = np.empty(len(S), dtype=bool)
    step = max(1, _CHUNK * 8 // max(P.n, 1))
    for s in range(0, len(S), step):
        out[s : s + step] = _visible_chunk(P, S[s : s + step], T[s : s + step], eps)
    return out


def make_polygon(outer: Sequence, holes: Sequence = ()) -> Polygon:
    """Convenience wrapper around :func:`validate_polygon`."""
    return validate_polygon([outer, *holes])
