"""Farthest-first (Gonzalez) placement of k centers in a polygon.

The distance from a point to the center set is the lower envelope of
additively weighted Euclidean distances: every center contributes one *site*
per anchor (the center itself and each reflex vertex, weighted by its
geodesic distance from the center). A maximum of that envelope lies at a
polygon vertex, at a boundary point equidistant from two sites, or at a
point equidistant from three sites. Those three families form the finite
candidate set searched each round.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .engine import engine_for, lex_order
from .errors import EmptySet, InvalidK
from .geometry import EPS, Point2, Polygon, as_points, boundary_points, contains

_ACTIVE_TOL = 1e-7


class CandidateSet(NamedTuple):
    voronoi_vertices: np.ndarray  # points equidistant from three sites
    edge_boundary_points: np.ndarray  # boundary points equidistant from two sites
    polygon_vertices: np.ndarray

    def all(self) -> np.ndarray:
        parts = [a for a in self if len(a)]
        return np.vstack(parts) if parts else np.zeros((0, 2))


@dataclass
class PlacementResult:
    centers: list
    radii_trace: list  # max-min distance when centers 2..k were chosen, then the final covering radius
    covering_radius: float
    certificate_delta: float
    next_point: Point2
    saturated: bool = False
    candidate_counts: list = field(default_factory=list)


def _sites(P: Polygon, C: np.ndarray) -> np.ndarray:
    """Rows (ax, ay, offset) for every center and reflex-vertex anchor."""
    eng = engine_for(P)
    V = P.vertices
    reflex = np.nonzero(P.reflex)[0]
    rows = []
    for f in eng.fields(C):
        rows.append((f.point[0], f.point[1], 0.0))
        for w in reflex:
            if np.isfinite(f.dist[w]) and f.dist[w] > EPS:
                rows.append((V[w, 0], V[w, 1], f.dist[w]))
    return np.unique(np.array(rows), axis=0)


def _three_site_points(S: np.ndarray):
    if len(S) < 3:
        return np.zeros((0, 2)), np.zeros(0)
    idx = np.array(list(combinations(range(len(S)), 3)))
    a1, a2, a3 = S[idx[:, 0]], S[idx[:, 1]], S[idx[:, 2]]
    M = np.stack([2 * (a2[:, :2] - a1[:, :2]), 2 * (a3[:, :2] - a1[:, :2])], axis=1)  # (m, 2, 2)
    g = np.stack([2 * (a2[:, 2] - a1[:, 2]), 2 * (a3[:, 2] - a1[:, 2])], axis=1)

    def sq(a):
        return a[:, 0] ** 2 + a[:, 1] ** 2 - a[:, 2] ** 2

    h = np.stack([sq(a2) - sq(a1), sq(a3) - sq(a1)], axis=1)
    det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    scale = np.abs(M).max(axis=(1, 2)) ** 2 + 1e-300
    ok = np.abs(det) > 1e-12 * scale
    det = np.where(ok, det, 1.0)
    inv = np.stack(
        [np.stack([M[:, 1, 1], -M[:, 0, 1]], 1), np.stack([-M[:, 1, 0], M[:, 0, 0]], 1)], axis=1
    ) / det[:, None, None]
    q0 = np.einsum("mij,mj->mi", inv, h)
    q1 = np.einsum("mij,mj->mi", inv, g)
    w = q0 - a1[:, :2]
    o1 = a1[:, 2]
    A = (q1**2).sum(1) - 1.0
    B = 2 * ((w * q1).sum(1) + o1)
    Cc = (w**2).sum(1) - o1**2
    pts, ts = [], []
    lin = np.abs(A) <= 1e-14
    with np.errstate(divide="ignore", invalid="ignore"):
        disc = B**2 - 4 * A * Cc
        root = np.sqrt(np.maximum(disc, 0.0))
        real = disc >= -1e-12 * (B**2 + 1)
        roots = (
            ((-B - root) / (2 * A), ok & ~lin & real),
            ((-B + root) / (2 * A), ok & ~lin & real),
            (-Cc / B, ok & lin),
        )
        for t, sel in roots:
            pts.append(q0 + q1 * t[:, None])
            ts.append(np.where(sel & np.isfinite(t), t, np.nan))
    P_ = np.vstack(pts)
    T = np.concatenate(ts)
    omax = np.tile(np.max(np.stack([a1[:, 2], a2[:, 2], a3[:, 2]]), axis=0), 3)
    good = np.isfinite(T) & (T >= omax - 1e-9) & np.all(np.isfinite(P_), axis=1)
    return P_[good], T[good]


def _edge_site_points(P: Polygon, S: np.ndarray):
    if len(S) < 2:
        return np.zeros((0, 2)), np.zeros(0)
    A_, B_ = P.edges
    pi, pj = np.triu_indices(len(S), k=1)
    a1, a2 = S[pi], S[pj]
    E0 = np.repeat(A_[None], len(pi), 0).reshape(-1, 2)
    Ev = np.repeat((B_ - A_)[None], len(pi), 0).reshape(-1, 2)
    a1 = np.repeat(a1, len(A_), 0)
    a2 = np.repeat(a2, len(A_), 0)
    d12 = a2[:, :2] - a1[:, :2]
    h = (a2[:, :2] ** 2).sum(1) - (a1[:, :2] ** 2).sum(1) - a2[:, 2] ** 2 + a1[:, 2] ** 2
    alpha = 2 * (d12 * Ev).sum(1)
    beta = -2 * (a2[:, 2] - a1[:, 2])
    gamma = h - 2 * (d12 * E0).sum(1)
    f = E0 - a1[:, :2]
    o1 = a1[:, 2]
    ee = (Ev**2).sum(1)
    out_s, out_t = [], []
    with np.errstate(divide="ignore", invalid="ignore"):
        wb = np.abs(beta) > 1e-14
        tau0 = gamma / beta
        tau1 = -alpha / beta
        qa = ee - tau1**2
        qb = 2 * ((f * Ev).sum(1) - tau1 * (tau0 - o1))
        qc = (f**2).sum(1) - (tau0 - o1) ** 2
        disc = qb**2 - 4 * qa * qc
        root = np.sqrt(np.maximum(disc, 0.0))
        small = np.abs(qa) <= 1e-14 * (ee + 1)
        for s in ((-qb - root) / (2 * qa), (-qb + root) / (2 * qa)):
            sel = wb & ~small & (disc >= -1e-12 * (qb**2 + 1))
            out_s.append(np.where(sel, s, np.nan))
            out_t.append(tau0 + tau1 * s)
        s_lin = -qc / qb
        out_s.append(np.where(wb & small, s_lin, np.nan))
        out_t.append(tau0 + tau1 * s_lin)
        # equal weights: the bisector is a line
        s_eq = gamma / alpha
        q_eq = E0 + s_eq[:, None] * Ev
        out_s.append(np.where(~wb & (np.abs(alpha) > 1e-14), s_eq, np.nan))
        out_t.append(o1 + np.hypot(*(q_eq - a1[:, :2]).T))
    s = np.concatenate(out_s)
    t = np.concatenate(out_t)
    E0r = np.tile(E0, (len(out_s), 1))
    Evr = np.tile(Ev, (len(out_s), 1))
    omax = np.tile(np.maximum(a1[:, 2], a2[:, 2]), len(out_s))
    good = np.isfinite(s) & (s >= -1e-12) & (s <= 1 + 1e-12) & np.isfinite(t) & (t >= omax - 1e-9)
    s = np.clip(s[good], 0.0, 1.0)
    return E0r[good] + s[:, None] * Evr[good], t[good]


def _unique_rows(X: np.ndarray, decimals: int = 10) -> np.ndarray:
    if len(X) == 0:
        return X
    _, keep = np.unique(np.round(X, decimals), axis=0, return_index=True)
    return X[np.sort(keep)]


def _active(P: Polygon, C: np.ndarray, X: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Keep points inside P whose solved level matches the true center distance."""
    if len(X) == 0:
        return X
    inside = contains(P, X, 1e-9)
    X, T = X[inside], T[inside]
    if len(X) == 0:
        return X
    euclid = np.min(np.hypot(X[:, None, 0] - C[None, :, 0], X[:, None, 1] - C[None, :, 1]), axis=1)
    tol = _ACTIVE_TOL * max(1.0, P.bbox_diagonal)
    pre = euclid <= T + tol
    X, T = X[pre], T[pre]
    if len(X) == 0:
        return X
    d = engine_for(P).pairwise(C, X).min(axis=0)
    return _unique_rows(X[np.abs(d - T) <= tol])


def candidate_set(P: Polygon, C) -> CandidateSet:
    """Finite point set containing every local maximum of the distance to ``C``."""
    C = as_points(C) if len(C) else np.zeros((0, 2))
    if len(C) == 0:
        raise EmptySet("candidate set needs at least one center")
    engine_for(P)._check_inside(C)
    S = _sites(P, C)
    X3, T3 = _three_site_points(S)
    X2, T2 = _edge_site_points(P, S)
    return CandidateSet(_active(P, C, X3, T3), _active(P, C, X2, T2), np.array(P.vertices))


def _grid_candidates(P: Polygon, h: float) -> np.ndarray:
    from .packing import grid_points

    return np.vstack([grid_points(P, h), boundary_points(P, h), P.vertices])


def _argmax_lex(X: np.ndarray, vals: np.ndarray, eps: float = EPS):
    best = vals.max()
    tied = np.nonzero(vals >= best - eps * max(1.0, best))[0]
    order = lex_order(X[tied])
    k = tied[order[0]]
    return Point2.of(X[k]), float(vals[k])


def farthest_candidate(P: Polygon, C, approx_grid: float | None = None):
    """Candidate point farthest from its nearest center, and that distance."""
    C = as_points(C) if len(C) else np.zeros((0, 2))
    if len(C) == 0:
        raise EmptySet("no centers")
    X = _grid_candidates(P, approx_grid) if approx_grid else candidate_set(P, C).all()
    vals = engine_for(P).pairwise(C, X).min(axis=0)
    return _argmax_lex(X, vals)


def covering_radius(P: Polygon, C, approx_grid: float | None = None) -> float:
    """Largest distance from a point of ``P`` to its nearest center in ``C``."""
    return farthest_candidate(P, C, approx_grid)[1]


def gonzalez_placement(P: Polygon, k: int, approx_grid: float | None = None) -> PlacementResult:
    """Farthest-first traversal starting at the first outer vertex."""
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidK(f"k must be a positive integer, got {k!r}")
    eng = engine_for(P)
    tol = 1e-9 * max(1.0, P.bbox_diagonal)
    centers = [Point2.of(P.outer[0])]
    trace = []
    counts = []
    saturated = False
    while True:
        C = np.array(centers)
        X = _grid_candidates(P, approx_grid) if approx_grid else candidate_set(P, C).all()
        counts.append(len(X))
        vals = eng.pairwise(C, X).min(axis=0)
        a, r = _argmax_lex(X, vals)
        trace.append(r)
        if len(centers) == k:
            break
        if r <= tol:
            saturated = True
            break
        centers.append(a)
    pts = np.vstack([np.array(centers), np.array(a)[None]])
    Dm = eng.pairwise(pts, pts)
    delta = float(Dm[np.triu_indices(len(pts), k=1)].min())
    return PlacementResult(centers, trace, trace[-1], delta, a, saturated, counts)


def k_cover(P: Polygon, k: int, approx_grid: float | None = None):
    res = gonzalez_placement(P, k, approx_grid)
    return res.centers, res.covering_radius


def k_pack(P: Polygon, k: int, approx_grid: float | None = None):
    if not isinstance(k, (int, np.integer)) or k < 2:
        raise InvalidK(f"k-packing needs k >= 2, got {k!r}")
    res = gonzalez_placement(P, k, approx_grid)
    C = np.array(res.centers)
    Dm = engine_for(P).pairwise(C, C)
    return res.centers, float(Dm[np.triu_indices(len(C), k=1)].min()) / 2.0
