"""Geodesic distance engine.

Distances are computed on the visibility graph of the polygon vertices. For a
query point ``p`` the *source field* holds ``d(p, v)`` for every vertex ``v``;
a target ``q`` is then either directly visible from ``p`` or reached through
its best visible vertex ``w``, so ``d(p, q) = field[w] + |w - q|``. That
per-target vertex is the anchor of the shortest path map cell containing
``q``.
"""
from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path as _csgraph_shortest_path
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.ops import unary_union

from .errors import EmptySet, PointOutsidePolygon
from .geometry import EPS, Point2, Polygon, as_points, contains, visible

_FIELD_CACHE = 4096
_BLOCK = 1 << 20  # max elements in a (sources, targets, vertices) block


class SourceField(NamedTuple):
    point: np.ndarray
    dist: np.ndarray  # (n,) geodesic distance to each vertex
    first: np.ndarray  # (n,) first vertex on the path (or the vertex itself)
    visible: np.ndarray  # (n,) vertex directly visible from the source


@dataclass(frozen=True)
class VisibilityGraph:
    nodes: np.ndarray
    edges: np.ndarray  # (e, 2) index pairs i < j
    weights: np.ndarray

    def adjacency(self) -> dict:
        adj = {i: [] for i in range(len(self.nodes))}
        for (i, j), w in zip(self.edges, self.weights):
            adj[int(i)].append((int(j), float(w)))
            adj[int(j)].append((int(i), float(w)))
        return adj


class GeodesicPath(NamedTuple):
    waypoints: list
    length: float


@dataclass(frozen=True)
class ShortestPathTree:
    source: Point2
    parent: np.ndarray  # -1 means the source itself
    dist: np.ndarray

    def chain(self, v: int) -> list:
        out = [v]
        while self.parent[out[-1]] >= 0:
            out.append(int(self.parent[out[-1]]))
        return out[::-1]


class SPMCell(NamedTuple):
    region: object  # shapely geometry
    anchor: Point2
    anchor_index: int  # -1 for the source
    offset: float


@dataclass(frozen=True)
class ShortestPathMap:
    source: Point2
    cells: tuple
    engine: "GeodesicEngine"

    def locate(self, q) -> SPMCell:
        """Cell whose anchor realizes the distance to ``q``."""
        idx = int(self.engine.anchors(self.source, as_points(q))[0])
        for cell in self.cells:
            if cell.anchor_index == idx:
                return cell
        v = self.engine.P.vertices
        anchor = self.source if idx < 0 else Point2.of(v[idx])
        off = 0.0 if idx < 0 else float(self.engine.field(self.source).dist[idx])
        return SPMCell(None, anchor, idx, off)

    def distance(self, q) -> float:
        cell = self.locate(q)
        q = as_points(q)[0]
        return cell.offset + float(np.hypot(q[0] - cell.anchor.x, q[1] - cell.anchor.y))


class GeodesicEngine:
    """Immutable geodesic distance oracle for one polygon.

    Construction computes vertex-to-vertex visibility and all-pairs shortest
    paths. Source fields are memoized; the cache is guarded by a lock so
    concurrent read-only queries are safe.
    """

    def __init__(self, P: Polygon, eps: float = EPS, weight_scale: dict | None = None):
        # weight_scale maps a visibility edge (i, j) to a multiplier; it only
        # exists to inject faults when testing the property suites
        self.P = P
        self.eps = eps
        V = P.vertices
        n = len(V)
        ii, jj = np.triu_indices(n, k=1)
        vis = visible(P, V[ii], V[jj], eps)
        ii, jj = ii[vis], jj[vis]
        w = np.hypot(*(V[ii] - V[jj]).T)
        for (a, b), f in (weight_scale or {}).items():
            hit = ((ii == a) & (jj == b)) | ((ii == b) & (jj == a))
            w[hit] *= f
        self.graph = VisibilityGraph(V, np.stack([ii, jj], axis=1), w)
        mat = csr_matrix((np.concatenate([w, w]), (np.concatenate([ii, jj]), np.concatenate([jj, ii]))), shape=(n, n))
        D, pred = _csgraph_shortest_path(mat, method="D", directed=False, return_predecessors=True)
        self.D = D
        self.pred = pred
        self._cache: OrderedDict = OrderedDict()
        self._lock = threading.Lock()

    # ---------------------------------------------------------------- fields
    def _check_inside(self, Q):
        inside = contains(self.P, Q, self.eps * 10)
        if not inside.all():
            bad = Q[~inside][0]
            raise PointOutsidePolygon(f"point ({bad[0]:.6g}, {bad[1]:.6g}) is outside the polygon")

    def _vertex_costs(self, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Euclidean cost (inf if not visible) from each point to each vertex."""
        V = self.P.vertices
        m, n = len(Q), len(V)
        S = np.repeat(Q, n, axis=0)
        T = np.tile(V, (m, 1))
        vis = visible(self.P, S, T, self.eps).reshape(m, n)
        euclid = np.hypot(Q[:, None, 0] - V[None, :, 0], Q[:, None, 1] - V[None, :, 1])
        return np.where(vis, euclid, np.inf), vis

    def fields(self, S) -> list[SourceField]:
        S = as_points(S)
        out: list = [None] * len(S)
        missing = []
        with self._lock:
            for i, p in enumerate(S):
                key = (float(p[0]), float(p[1]))
                hit = self._cache.get(key)
                if hit is not None:
                    self._cache.move_to_end(key)
                    out[i] = hit
                else:
                    missing.append(i)
        if missing:
            M = S[missing]
            cost, vis = self._vertex_costs(M)
            n = self.P.n
            step = max(1, _BLOCK // max(n * n, 1))
            for s in range(0, len(M), step):
                c = cost[s : s + step]
                tot = c[:, :, None] + self.D[None, :, :]
                first = np.argmin(tot, axis=1)
                dist = np.take_along_axis(tot, first[:, None, :], axis=1)[:, 0, :]
                for k in range(len(c)):
                    i = missing[s + k]
                    f = SourceField(S[i].copy(), dist[k], first[k], vis[s + k])
                    out[i] = f
            with self._lock:
                for i in missing:
                    key = (float(S[i][0]), float(S[i][1]))
                    self._cache[key] = out[i]
                while len(self._cache) > _FIELD_CACHE:
                    self._cache.popitem(last=False)
        return out

    def field(self, p) -> SourceField:
        return self.fields(p)[0]

    # ------------------------------------------------------------- distances
    def distances_from(self, p, Q) -> np.ndarray:
        """Geodesic distances from a single source ``p`` to every row of ``Q``."""
        p = as_points(p)[0]
        Q = as_points(Q)
        f = self.field(p)
        cost, _ = self._vertex_costs(Q)
        via = np.min(f.dist[None, :] + cost, axis=1) if self.P.n else np.full(len(Q), np.inf)
        direct = visible(self.P, p[None], Q, self.eps)
        return np.where(direct, np.hypot(Q[:, 0] - p[0], Q[:, 1] - p[1]), via)

    def pairwise(self, S, T) -> np.ndarray:
        """Geodesic distance matrix of shape (len(S), len(T))."""
        S, T = as_points(S), as_points(T)
        F = np.array([f.dist for f in self.fields(S)])
        cost, _ = self._vertex_costs(T)
        m, t, n = len(S), len(T), self.P.n
        out = np.empty((m, t))
        step = max(1, _BLOCK // max(t * n, 1))
        for s in range(0, m, step):
            out[s : s + step] = np.min(F[s : s + step, None, :] + cost[None, :, :], axis=2)
        direct = visible(self.P, np.repeat(S, t, axis=0), np.tile(T, (m, 1)), self.eps).reshape(m, t)
        euclid = np.hypot(S[:, None, 0] - T[None, :, 0], S[:, None, 1] - T[None, :, 1])
        return np.where(direct, euclid, out)

    def paired(self, S, T) -> np.ndarray:
        """Elementwise distances d(S[i], T[i])."""
        S, T = as_points(S), as_points(T)
        if len(S) == 1 and len(T) > 1:
            return self.distances_from(S[0], T)
        F = np.array([f.dist for f in self.fields(S)])
        cost, _ = self._vertex_costs(T)
        via = np.min(F + cost, axis=1)
        direct = visible(self.P, S, T, self.eps)
        return np.where(direct, np.hypot(*(S - T).T), via)

    def distance(self, p, q) -> float:
        return float(self.paired(p, q)[0])

    def anchors(self, p, Q) -> np.ndarray:
        """Index of the last path vertex before each target (-1 if visible)."""
        p = as_points(p)[0]
        Q = as_points(Q)
        f = self.field(p)
        cost, _ = self._vertex_costs(Q)
        idx = np.argmin(f.dist[None, :] + cost, axis=1)
        direct = visible(self.P, p[None], Q, self.eps)
        return np.where(direct, -1, idx)

    # ------------------------------------------------------------------ paths
    def _vertex_chain(self, u: int, w: int) -> list:
        chain = [w]
        while chain[-1] != u:
            nxt = self.pred[u, chain[-1]]
            if nxt < 0:
                break
            chain.append(int(nxt))
        return chain[::-1]

    def shortest_path(self, p, q) -> GeodesicPath:
        p, q = as_points(p)[0], as_points(q)[0]
        self._check_inside(np.array([p, q]))
        if np.hypot(*(p - q)) <= self.eps:
            return GeodesicPath([Point2.of(p)], 0.0)
        if visible(self.P, p[None], q[None], self.eps)[0]:
            return GeodesicPath([Point2.of(p), Point2.of(q)], float(np.hypot(*(p - q))))
        f = self.field(p)
        cost, _ = self._vertex_costs(q[None])
        tot = f.dist + cost[0]
        w = int(np.argmin(tot))
        u = int(f.first[w])
        V = self.P.vertices
        pts = [p] + [V[i] for i in self._vertex_chain(u, w)] + [q]
        pts = _drop_collinear(pts, self.eps)
        return GeodesicPath([Point2.of(x) for x in pts], float(tot[w]))

    def shortest_path_tree(self, source) -> ShortestPathTree:
        s = as_points(source)[0]
        self._check_inside(s[None])
        f = self.field(s)
        parent = np.full(self.P.n, -1, dtype=int)
        for v in range(self.P.n):
            u = int(f.first[v])
            if u != v:
                parent[v] = int(self.pred[u, v])
            elif f.dist[v] > self.eps:
                parent[v] = -1
        # a vertex coinciding with the source has no parent either
        return ShortestPathTree(Point2.of(s), parent, f.dist.copy())

    # --------------------------------------------------------- visibility map
    def visibility_polygon(self, p):
        """Region of ``P`` visible from ``p`` as a shapely geometry."""
        p = as_points(p)[0]
        V = self.P.vertices
        A, B = self.P.edges
        rel = V - p
        far = np.hypot(rel[:, 0], rel[:, 1]) > self.eps
        ang = np.sort(np.unique(np.round(np.arctan2(rel[far, 1], rel[far, 0]), 15)))
        ang = np.concatenate([ang, np.linspace(-np.pi, np.pi, 17)[:-1]])
        ang = np.unique(ang)
        nxt = np.concatenate([ang[1:], [ang[0] + 2 * np.pi]])
        tris = []
        e = B - A
        for a0, a1 in zip(ang, nxt):
            if a1 - a0 <= 1e-14:
                continue
            mid = 0.5 * (a0 + a1)
            u = np.array([np.cos(mid), np.sin(mid)])
            hit = _ray_hits(p, u, A, e, self.eps)
            k = int(np.argmin(hit))
            t = hit[k]
            if not np.isfinite(t):
                continue
            probe = p + 0.5 * t * u
            if not contains(self.P, probe[None], self.eps)[0]:
                continue
            corners = []
            for ang_i in (a0, a1):
                ui = np.array([np.cos(ang_i), np.sin(ang_i)])
                ti = _ray_line(p, ui, A[k], e[k])
                if not np.isfinite(ti):
                    ti = t
                corners.append(p + ti * ui)
            tri = ShapelyPolygon([tuple(p), tuple(corners[0]), tuple(corners[1])])
            if tri.area > 0:
                tris.append(tri)
        if not tris:
            return ShapelyPolygon()
        return unary_union(tris).buffer(0).intersection(self.P.shape)

    def _next_bend(self, s, q, idx) -> int:
        path = self.shortest_path(s, q).waypoints
        V = self.P.vertices
        start = 0
        if idx >= 0:
            dd = [np.hypot(w.x - V[idx][0], w.y - V[idx][1]) for w in path]
            start = int(np.argmin(dd))
        if start + 1 >= len(path) - 1:
            return idx
        w = path[start + 1]
        return int(np.argmin(np.hypot(V[:, 0] - w.x, V[:, 1] - w.y)))

    def shortest_path_map(self, source) -> ShortestPathMap:
        s = as_points(source)[0]
        self._check_inside(s[None])
        f = self.field(s)
        tiny = 1e-10 * max(self.P.area, 1.0)
        cells: dict = {}

        def claim(idx, region):
            if region.is_empty or region.area <= tiny:
                return
            anchor = Point2.of(s) if idx < 0 else Point2.of(self.P.vertices[idx])
            off = 0.0 if idx < 0 else float(f.dist[idx])
            if idx in cells:
                prev = cells[idx]
                cells[idx] = SPMCell(prev.region.union(region), anchor, idx, off)
            else:
                cells[idx] = SPMCell(region, anchor, idx, off)

        # pocket recursion: a pocket is a component of what the current anchor
        # cannot see; its own anchor is the next bend on the path into it
        stack = [(-1, self.P.shape, 0)]
        while stack:
            idx, region, depth = stack.pop()
            pt = s if idx < 0 else self.P.vertices[idx]
            seen = self.visibility_polygon(pt).intersection(region)
            claim(idx, seen)
            rest = region.difference(seen)
            for comp in getattr(rest, "geoms", [rest]):
                if comp.is_empty or comp.area <= tiny or comp.geom_type != "Polygon":
                    continue
                rep = np.array(comp.representative_point().coords[0])
                nxt = self._next_bend(s, rep, idx)
                if nxt == idx or depth > 2 * self.P.n:
                    claim(idx, comp)
                    continue
                stack.append((nxt, comp, depth + 1))
        ordered = sorted(cells.values(), key=lambda c: (c.offset, c.anchor_index))
        return ShortestPathMap(Point2.of(s), tuple(ordered), self)


def _ray_hits(p, u, A, e, eps):
    """Distance along ray p + t u to each segment A + s e (inf if missed)."""
    den = u[0] * e[:, 1] - u[1] * e[:, 0]
    w = A - p
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / den
        s = (w[:, 0] * u[1] - w[:, 1] * u[0]) / den
    ok = (np.abs(den) > 1e-15) & (t > eps) & (s >= -1e-12) & (s <= 1 + 1e-12)
    return np.where(ok, t, np.inf)


def _ray_line(p, u, a, e):
    den = u[0] * e[1] - u[1] * e[0]
    if abs(den) <= 1e-15:
        return np.inf
    w = a - p
    t = (w[0] * e[1] - w[1] * e[0]) / den
    return t if t > 0 else np.inf


def _drop_collinear(pts, eps):
    out = [pts[0]]
    for i in range(1, len(pts) - 1):
        a, b, c = out[-1], pts[i], pts[i + 1]
        if np.hypot(*(b - a)) <= eps:
            continue
        cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if abs(cr) <= eps * max(np.hypot(*(b - a)) * np.hypot(*(c - b)), eps):
            continue
        out.append(b)
    out.append(pts[-1])
    return out


@lru_cache(maxsize=64)
def engine_for(P: Polygon) -> GeodesicEngine:
    """Shared engine per polygon (polygons are immutable and hashable)."""
    return GeodesicEngine(P)


# ------------------------------------------------------------------ functional


def geodesic_distance(P: Polygon, p, q) -> float:
    eng = engine_for(P)
    pts = np.vstack([as_points(p), as_points(q)])
    eng._check_inside(pts)
    return eng.distance(pts[0], pts[1])


def shortest_path(P: Polygon, p, q) -> GeodesicPath:
    return engine_for(P).shortest_path(p, q)


def shortest_path_tree(P: Polygon, source) -> ShortestPathTree:
    return engine_for(P).shortest_path_tree(source)


def shortest_path_map(P: Polygon, source) -> ShortestPathMap:
    return engine_for(P).shortest_path_map(source)


def visibility_graph(P: Polygon, extra=None) -> VisibilityGraph:
    """Visibility graph on the vertices, optionally augmented with query points."""
    eng = engine_for(P)
    if extra is None or len(as_points(extra)) == 0:
        return eng.graph
    X = as_points(extra)
    eng._check_inside(X)
    nodes = np.vstack([P.vertices, X])
    ii, jj = np.triu_indices(len(nodes), k=1)
    keep = jj >= P.n
    ii, jj = ii[keep], jj[keep]
    vis = visible(P, nodes[ii], nodes[jj], eng.eps)
    ii, jj = ii[vis], jj[vis]
    edges = np.vstack([eng.graph.edges, np.stack([ii, jj], 1)])
    w = np.concatenate([eng.graph.weights, np.hypot(*(nodes[ii] - nodes[jj]).T)])
    return VisibilityGraph(nodes, edges, w)


def lex_order(pts: np.ndarray) -> np.ndarray:
    """Lexicographic order of points, treating coordinates within rounding noise as equal."""
    if len(pts) == 0:
        return np.zeros(0, dtype=int)
    tol = 1e-9 * max(1.0, float(np.abs(pts).max()))
    keys = np.round(pts / tol)
    return np.lexsort((keys[:, 1], keys[:, 0]))


def lex_sorted(points) -> np.ndarray:
    pts = as_points(points)
    return pts[lex_order(pts)]


def diametral_pair(P: Polygon, V, eps: float = EPS):
    """Pair of points of ``V`` at maximum geodesic distance.

    Ties are broken by lexicographic order of the (u, v) coordinates, with
    ``u`` lexicographically not larger than ``v``.
    """
    pts = as_points(V) if len(V) else np.zeros((0, 2))
    if len(pts) == 0:
        raise EmptySet("diametral pair of an empty set")
    pts = lex_sorted(pts)
    if len(pts) == 1:
        p = Point2.of(pts[0])
        return p, p, 0.0
    eng = engine_for(P)
    eng._check_inside(pts)
    Dm = eng.pairwise(pts, pts)
    Dm = np.maximum(Dm, Dm.T)  # exact symmetry against rounding
    iu, ju = np.triu_indices(len(pts), k=1)
    vals = Dm[iu, ju]
    best = vals.max()
    k = int(np.nonzero(vals >= best - eps * max(1.0, best))[0][0])
    return Point2.of(pts[iu[k]]), Point2.of(pts[ju[k]]), float(vals[k])


def farthest_point_from_set(P: Polygon, C):
    """Point of ``P`` maximizing the distance to its nearest point of ``C``."""
    from .covering import farthest_candidate

    a, r = farthest_candidate(P, C)
    return a, r
