"""Geodesic disks, their boundaries, and the boundary of a union of disks.

A geodesic circle of radius ``r`` about ``c`` is a chain of circular arcs. Each
arc is centered at an anchor ``a`` (the source itself or a polygon vertex at
geodesic distance ``o < r``) with residual radius ``r - o``. The disk
boundary additionally contains the stretches of the polygon boundary that lie
within distance ``r``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np
from shapely.geometry import Point as ShapelyPoint
from shapely.ops import unary_union

from .engine import GeodesicEngine, engine_for
from .errors import NonPositiveRadius
from .geometry import EPS, Point2, Polygon, as_points, contains, on_boundary, visible

TWO_PI = 2.0 * math.pi
_ANG_TOL = 1e-12


class GeodesicDisk(NamedTuple):
    center: Point2
    radius: float


class Arc(NamedTuple):
    anchor: Point2
    residual_radius: float
    start_angle: float
    end_angle: float  # end > start, counterclockwise sweep

    @property
    def sweep(self) -> float:
        return self.end_angle - self.start_angle

    def point_at(self, theta: float) -> Point2:
        return Point2(
            self.anchor.x + self.residual_radius * math.cos(theta),
            self.anchor.y + self.residual_radius * math.sin(theta),
        )

    @property
    def midpoint(self) -> Point2:
        return self.point_at(0.5 * (self.start_angle + self.end_angle))

    @property
    def endpoints(self) -> tuple[Point2, Point2]:
        return self.point_at(self.start_angle), self.point_at(self.end_angle)

    def sample(self, k: int) -> np.ndarray:
        th = np.linspace(self.start_angle, self.end_angle, k)
        return np.stack(
            [self.anchor.x + self.residual_radius * np.cos(th), self.anchor.y + self.residual_radius * np.sin(th)], 1
        )

    def covers_angle(self, theta: float, tol: float = 1e-10) -> bool:
        rel = (theta - self.start_angle) % TWO_PI
        if rel > TWO_PI - tol:
            rel -= TWO_PI
        return -tol <= rel <= self.sweep + tol

    def param(self, p) -> float:
        """Angle of ``p`` unwrapped into this arc's angular range where possible."""
        th = math.atan2(p[1] - self.anchor.y, p[0] - self.anchor.x)
        rel = (th - self.start_angle) % TWO_PI
        if rel > TWO_PI - 1e-10:
            rel -= TWO_PI
        return self.start_angle + rel

    def sub(self, a: float, b: float) -> "Arc":
        return Arc(self.anchor, self.residual_radius, a, b)


class BoundarySegment(NamedTuple):
    start: Point2
    end: Point2
    edge: int

    def point_at(self, t: float) -> Point2:
        return Point2(self.start.x + t * (self.end.x - self.start.x), self.start.y + t * (self.end.y - self.start.y))

    @property
    def midpoint(self) -> Point2:
        return self.point_at(0.5)

    @property
    def length(self) -> float:
        return math.hypot(self.end.x - self.start.x, self.end.y - self.start.y)

    def sub(self, a: float, b: float) -> "BoundarySegment":
        return BoundarySegment(self.point_at(a), self.point_at(b), self.edge)


Piece = Union[Arc, BoundarySegment]


@dataclass(frozen=True)
class DiskBoundary:
    polygon: Polygon
    disk: GeodesicDisk
    arcs: tuple
    boundary_portions: tuple

    @property
    def pieces(self) -> tuple:
        return self.arcs + self.boundary_portions

    def to_svg_paths(self) -> list[str]:
        from .io import disk_boundary_svg_paths

        return disk_boundary_svg_paths(self)


# --------------------------------------------------------------------------
# low level circle helpers


def circle_circle(c1, r1, c2, r2, tol=1e-12):
    """Intersection points of two circles and a tangency flag."""
    dx, dy = c2[0] - c1[0], c2[1] - c1[1]
    d = math.hypot(dx, dy)
    if d <= tol:
        return [], False
    scale = max(r1, r2, 1.0)
    if d > r1 + r2 + tol * scale or d < abs(r1 - r2) - tol * scale:
        return [], False
    a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h2 = r1 * r1 - a * a
    mx, my = c1[0] + a * dx / d, c1[1] + a * dy / d
    if h2 <= (tol * scale) ** 2 * 100 or abs(d - (r1 + r2)) <= tol * scale or abs(d - abs(r1 - r2)) <= tol * scale:
        return [Point2(mx, my)], True
    h = math.sqrt(h2)
    return [Point2(mx - h * dy / d, my + h * dx / d), Point2(mx + h * dy / d, my - h * dx / d)], False


def circle_segment(c, r, a, b, tol=1e-12):
    """Parameters t in [0, 1] where segment a + t (b - a) meets the circle."""
    ex, ey = b[0] - a[0], b[1] - a[1]
    fx, fy = a[0] - c[0], a[1] - c[1]
    A = ex * ex + ey * ey
    if A <= 1e-300:
        return [], False
    B = 2 * (fx * ex + fy * ey)
    C = fx * fx + fy * fy - r * r
    disc = B * B - 4 * A * C
    scale = max(abs(B * B), abs(4 * A * C), 1e-300)
    if disc < -1e-12 * scale:
        return [], False
    if abs(disc) <= 1e-12 * scale:
        t = -B / (2 * A)
        return ([t] if -1e-12 <= t <= 1 + 1e-12 else []), True
    sq = math.sqrt(disc)
    ts = [(-B - sq) / (2 * A), (-B + sq) / (2 * A)]
    return [min(max(t, 0.0), 1.0) for t in ts if -1e-12 <= t <= 1 + 1e-12], False


def _angle(c, p) -> float:
    return math.atan2(p[1] - c[1], p[0] - c[0]) % TWO_PI


# --------------------------------------------------------------------------
# disk boundary


def _sites(eng: GeodesicEngine, c: np.ndarray, r: float):
    f = eng.field(c)
    V = eng.P.vertices
    sites = [(Point2.of(c), -1, r)]
    for i in np.argsort(f.dist, kind="stable"):
        if f.dist[i] < r - EPS and math.hypot(*(V[i] - c)) > EPS:
            sites.append((Point2.of(V[i]), int(i), r - float(f.dist[i])))
    return sites


def disk_boundary(P: Polygon, c, r: float) -> DiskBoundary:
    """Boundary of the geodesic disk of radius ``r`` about ``c``."""
    if not r > EPS:
        raise NonPositiveRadius(f"radius must be positive, got {r}")
    c = as_points(c)[0]
    engine_for(P)._check_inside(c[None])
    return _disk_boundary(P, float(c[0]), float(c[1]), float(r))


@lru_cache(maxsize=1024)
def _disk_boundary(P: Polygon, cx: float, cy: float, r: float) -> DiskBoundary:
    eng = engine_for(P)
    c = np.array([cx, cy])
    sites = _sites(eng, c, r)
    V = P.vertices
    A, B = P.edges
    tol = 1e-7 * max(1.0, r)

    pieces = []  # (site number, a0, a1)
    mids = []
    for s, (a, idx, rho) in enumerate(sites):
        cuts = {0.0}
        for w in V:
            if math.hypot(w[0] - a.x, w[1] - a.y) > EPS:
                th = _angle(a, w)
                cuts.add(th)
                cuts.add((th + math.pi) % TWO_PI)
        for p, q in zip(A, B):
            ts, _ = circle_segment(a, rho, p, q)
            for t in ts:
                cuts.add(_angle(a, p + t * (q - p)))
        for s2, (b, _, rho2) in enumerate(sites):
            if s2 != s:
                pts, _ = circle_circle(a, rho, b, rho2)
                cuts.update(_angle(a, x) for x in pts)
                # shadow rays: the circles are tangent where the ray b->a continues
                if math.hypot(a.x - b.x, a.y - b.y) > EPS:
                    cuts.add(_angle(a, (2 * a.x - b.x, 2 * a.y - b.y)))
        cuts = sorted(cuts)
        cuts.append(cuts[0] + TWO_PI)
        for a0, a1 in zip(cuts[:-1], cuts[1:]):
            if a1 - a0 <= _ANG_TOL:
                continue
            m = 0.5 * (a0 + a1)
            pieces.append((s, a0, a1))
            mids.append((a.x + rho * math.cos(m), a.y + rho * math.sin(m)))

    arcs = []
    if pieces:
        M = np.array(mids)
        ok = contains(P, M)
        d = np.full(len(M), np.inf)
        if ok.any():
            d[ok] = eng.distances_from(c, M[ok])
        anchors = np.array([[sites[s][0].x, sites[s][0].y] for s, _, _ in pieces])
        vis = visible(P, anchors, M)
        good = ok & (np.abs(d - r) <= tol) & vis
        runs: list = []
        for (s, a0, a1), g in zip(pieces, good):
            if not g:
                continue
            if runs and runs[-1][0] == s and abs(runs[-1][2] - a0) <= _ANG_TOL:
                runs[-1][2] = a1
            else:
                runs.append([s, a0, a1])
        # join a run that wraps through angle zero
        merged = []
        for s in {r_[0] for r_ in runs}:
            mine = [r_ for r_ in runs if r_[0] == s]
            if len(mine) > 1 and abs(mine[-1][2] - TWO_PI - mine[0][1]) <= _ANG_TOL:
                mine[0] = [s, mine[-1][1] - TWO_PI, mine[0][2]]
                mine.pop()
            merged.extend(mine)
        merged.sort(key=lambda r_: (r_[0], r_[1]))
        for s, a0, a1 in merged:
            a, _, rho = sites[s]
            arcs.append(Arc(a, rho, a0, a1))

    portions = []
    for e, (p, q) in enumerate(zip(A, B)):
        ts = {0.0, 1.0}
        for a, _, rho in sites:
            tt, _ = circle_segment(a, rho, p, q)
            ts.update(tt)
        ts = sorted(ts)
        segs = [(t0, t1) for t0, t1 in zip(ts[:-1], ts[1:]) if t1 - t0 > 1e-12]
        if not segs:
            continue
        M = np.array([p + 0.5 * (t0 + t1) * (q - p) for t0, t1 in segs])
        dm = eng.distances_from(c, M)
        run = None
        for (t0, t1), dv in zip(segs, dm):
            if dv <= r + tol:
                run = (run[0], t1) if run is not None else (t0, t1)
            elif run is not None:
                portions.append(BoundarySegment(Point2.of(p + run[0] * (q - p)), Point2.of(p + run[1] * (q - p)), e))
                run = None
        if run is not None:
            portions.append(BoundarySegment(Point2.of(p + run[0] * (q - p)), Point2.of(p + run[1] * (q - p)), e))

    return DiskBoundary(P, GeodesicDisk(Point2.of(c), float(r)), tuple(arcs), tuple(portions))


def disk_contains(P: Polygon, D: GeodesicDisk, q, eps: float = EPS) -> bool:
    eng = engine_for(P)
    q = as_points(q)
    eng._check_inside(q)
    return bool(eng.distance(np.asarray(D.center, dtype=float), q[0]) <= D.radius + eps)


def disk_region(P: Polygon, c, r: float, segments: int = 256):
    """Geodesic disk as a shapely geometry (circles tessellated into ``segments`` sides)."""
    eng = engine_for(P)
    c = as_points(c)[0]
    parts = []
    for a, _, rho in _sites(eng, c, r):
        ball = ShapelyPoint(a.x, a.y).buffer(rho, quad_segs=max(1, segments // 4))
        parts.append(ball.intersection(eng.visibility_polygon(np.array(a))))
    return unary_union(parts).intersection(P.shape)


# --------------------------------------------------------------------------
# intersections between boundary pieces


def piece_intersections(p1: Piece, p2: Piece):
    """Intersections of two pieces as (point, tangential, param1, param2)."""
    out = []
    if isinstance(p1, Arc) and isinstance(p2, Arc):
        pts, tang = circle_circle(p1.anchor, p1.residual_radius, p2.anchor, p2.residual_radius)
        for x in pts:
            t1, t2 = p1.param(x), p2.param(x)
            if p1.covers_angle(t1) and p2.covers_angle(t2):
                out.append((x, tang, t1, t2))
    elif isinstance(p1, Arc) and isinstance(p2, BoundarySegment):
        ts, tang = circle_segment(p1.anchor, p1.residual_radius, p2.start, p2.end)
        for t in ts:
            x = p2.point_at(t)
            t1 = p1.param(x)
            if p1.covers_angle(t1):
                out.append((x, tang, t1, t))
    elif isinstance(p1, BoundarySegment) and isinstance(p2, Arc):
        out = [(x, tg, b, a) for x, tg, a, b in piece_intersections(p2, p1)]
    return out


def _dedupe(points, tol=1e-9):
    kept = []
    for p in points:
        if all(math.hypot(p[0][0] - k[0][0], p[0][1] - k[0][1]) > tol for k in kept):
            kept.append(p)
    return kept


def boundary_intersections(b1: DiskBoundary, b2: DiskBoundary, with_flags: bool = False):
    """Points where two disk boundaries meet.

    Arc pairs are solved as circle-circle intersections and arc/boundary
    pairs as circle-segment intersections; collinear overlaps of boundary
    portions are not reported. With ``with_flags`` each entry is
    ``(point, tangential)``.
    """
    hits = []
    for x in b1.pieces:
        for y in b2.pieces:
            for pt, tang, _, _ in piece_intersections(x, y):
                hits.append((Point2.of(pt), tang))
    hits = _dedupe(hits)
    return hits if with_flags else [p for p, _ in hits]


# --------------------------------------------------------------------------
# arrangement boundary


@dataclass(frozen=True)
class ArrangementBoundary:
    polygon: Polygon
    disks: tuple = ()
    pieces: tuple = ()  # (disk index, Arc | BoundarySegment)

    @classmethod
    def empty(cls, P: Polygon) -> "ArrangementBoundary":
        return cls(P, (), ())


def _strictly_inside(eng: GeodesicEngine, disk: GeodesicDisk, pts: np.ndarray) -> np.ndarray:
    if len(pts) == 0:
        return np.zeros(0, dtype=bool)
    d = eng.distances_from(np.asarray(disk.center), pts)
    return d < disk.radius - 1e-9 * max(1.0, disk.radius)


def _clip(eng, piece: Piece, cutters: list, disks: list) -> list:
    """Parts of ``piece`` outside the interiors of ``disks``."""
    if isinstance(piece, Arc):
        lo, hi = piece.start_angle, piece.end_angle
    else:
        lo, hi = 0.0, 1.0
    cuts = {lo, hi}
    for b in cutters:
        for other in b.pieces:
            for _, _, t, _ in piece_intersections(piece, other):
                if lo < t < hi:
                    cuts.add(t)
    cuts = sorted(cuts)
    spans = [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b - a > 1e-12]
    if not spans:
        return []
    mids = np.array([piece.point_at(0.5 * (a + b)) for a, b in spans])
    inside = np.zeros(len(spans), dtype=bool)
    for disk in disks:
        inside |= _strictly_inside(eng, disk, mids)
    out = []
    for (a, b), bad in zip(spans, inside):
        if bad:
            continue
        if out and abs(out[-1][1] - a) <= 1e-12:
            out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    full = isinstance(piece, Arc) and piece.sweep >= TWO_PI - 1e-12
    if full and len(out) > 1 and out[0][0] == lo and out[-1][1] == hi:
        first = out.pop(0)
        out[-1] = (out[-1][0], first[1] + TWO_PI)
    return [piece.sub(a, b) for a, b in out]


def update_arrangement(A: ArrangementBoundary, D: DiskBoundary):
    """Add disk boundary ``D`` to arrangement ``A``.

    Returns the new arrangement and the candidate points created by the
    insertion: intersections of ``D`` with the old arrangement boundary and
    the points where ``D``'s circle meets the part of the polygon boundary
    not yet inside an earlier disk.
    """
    P = A.polygon
    eng = engine_for(P)
    old_disks = list(A.disks)

    new_points = []
    for _, piece in A.pieces:
        for mine in D.pieces:
            for pt, tang, _, _ in piece_intersections(mine, piece):
                new_points.append((Point2.of(pt), tang))

    ends = [p for arc in D.arcs for p in arc.endpoints]
    if ends:
        E = np.array(ends)
        keep = on_boundary(P, E, 1e-8)
        for disk in old_disks:
            keep &= ~_strictly_inside(eng, disk, E)
        new_points.extend((Point2.of(p), False) for p in E[keep])
    new_points = [p for p, _ in _dedupe(new_points)]

    k = len(old_disks)
    pieces = []
    for i, piece in A.pieces:
        pieces.extend((i, x) for x in _clip(eng, piece, [D], [D.disk]))
    if old_disks:
        old_bounds = [disk_boundary(P, d.center, d.radius) for d in old_disks]
        for piece in D.pieces:
            pieces.extend((k, x) for x in _clip(eng, piece, old_bounds, old_disks))
    else:
        pieces.extend((k, x) for x in D.pieces)
    return ArrangementBoundary(P, tuple(old_disks) + (D.disk,), tuple(pieces)), new_points
