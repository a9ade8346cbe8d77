"""Brute-force references and randomized property checks.

The grid distance oracle runs Dijkstra on a lattice whose links are accepted
by shapely's ``covers`` predicate, so it shares no code path with the
visibility-graph engine. The exhaustive optimizers enumerate center subsets
from a lattice and evaluate them on sample points, then re-evaluate the
winner exactly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import shapely
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .covering import covering_radius, gonzalez_placement, k_pack
from .disk import GeodesicDisk
from .engine import GeodesicEngine, engine_for
from .errors import DisconnectedSample, InvariantViolation, TooManyCandidates
from .geometry import EPS, Polygon, as_points, boundary_points, sample_points
from .packing import greedy_packing, grid_points, verify_packing

SUITES = ("metric", "lemmas", "ratios")


# --------------------------------------------------------------------------
# grid graph distances


@dataclass(frozen=True)
class GridGraph:
    step: float
    nodes: np.ndarray  # lattice points inside P, then the polygon vertices
    edges: np.ndarray  # (m, 2) node index pairs
    weights: np.ndarray
    reach: int = 3  # neighbourhood: all primitive offsets with max(|a|, |b|) <= reach

    def matrix(self, extra: int = 0):
        n = len(self.nodes) + extra
        i, j = self.edges.T
        return coo_matrix((self.weights, (i, j)), shape=(n, n))


def _offsets(reach: int):
    out = []
    for a in range(0, reach + 1):
        for b in range(-reach, reach + 1):
            if (a, b) <= (0, 0) or math.gcd(a, abs(b)) != 1:
                continue
            out.append((a, b))
    return out


@lru_cache(maxsize=16)
def grid_graph(P: Polygon, step: float, reach: int = 3) -> GridGraph:
    """Lattice graph over ``P``; links are kept when the segment lies in ``P``.

    ``reach=1`` gives the 8-neighbourhood, whose metrication error is up to
    about 8%; ``reach=3`` (32 directions) keeps it near 1.3%. Polygon
    vertices are added as nodes linked to everything within ``reach + 1``
    steps.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    x0, y0, x1, y1 = P.shape.bounds
    nx = int(np.floor((x1 - x0) / step + 1e-9)) + 1
    ny = int(np.floor((y1 - y0) / step + 1e-9)) + 1
    gx, gy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    pts = np.stack([x0 + gx.ravel() * step, y0 + gy.ravel() * step], 1)
    keep = shapely.covers(P.shape, shapely.points(pts))
    index = np.full(nx * ny, -1)
    index[keep] = np.arange(int(keep.sum()))
    index = index.reshape(nx, ny)
    nodes = pts[keep]
    E, W = [], []
    for a, b in _offsets(reach):
        ia = slice(0, nx - a)
        ib = slice(max(0, -b), ny - max(0, b))
        ja = slice(a, nx)
        jb = slice(ib.start + b, ib.stop + b)
        u = index[ia, ib].ravel()
        v = index[ja, jb].ravel()
        ok = (u >= 0) & (v >= 0)
        u, v = u[ok], v[ok]
        if not len(u):
            continue
        lines = shapely.linestrings(np.stack([nodes[u], nodes[v]], 1))
        inside = shapely.covers(P.shape, lines)
        u, v = u[inside], v[inside]
        E.append(np.stack([u, v], 1))
        W.append(np.full(len(u), step * math.hypot(a, b)))
    # polygon vertices join as extra nodes with short local links, so lattice
    # paths can wrap tightly around reflex corners
    base = len(nodes)
    V = P.vertices
    nodes = np.vstack([nodes, V])
    rad = (reach + 1) * step
    for k, v in enumerate(V):
        near = np.nonzero(np.hypot(*(nodes - v).T) <= rad)[0]
        near = near[near != base + k]
        if not len(near):
            continue
        lines = shapely.linestrings(np.stack([np.repeat(v[None], len(near), 0), nodes[near]], 1))
        near = near[shapely.covers(P.shape, lines)]
        E.append(np.stack([np.full(len(near), base + k), near], 1))
        W.append(np.hypot(*(nodes[near] - v).T))
    edges = np.vstack(E) if E else np.zeros((0, 2), int)
    weights = np.concatenate(W) if W else np.zeros(0)
    edges = np.vstack([edges, edges[:, ::-1]])
    weights = np.concatenate([weights, weights])
    return GridGraph(float(step), nodes, edges, weights, reach)


def _snap(P: Polygon, G: GridGraph, p: np.ndarray):
    r = (G.reach + 1) * G.step
    near = np.nonzero(np.hypot(*(G.nodes - p).T) <= r)[0]
    if len(near):
        lines = shapely.linestrings(np.stack([np.repeat(p[None], len(near), 0), G.nodes[near]], 1))
        near = near[shapely.covers(P.shape, lines)]
    if not len(near):
        raise DisconnectedSample(f"no lattice node visible from ({p[0]:.6g}, {p[1]:.6g}) at step {G.step:g}")
    return near, np.hypot(*(G.nodes[near] - p).T)


def grid_distance(P: Polygon, step: float, p, q, reach: int = 3) -> float:
    """Lattice shortest-path distance between ``p`` and ``q`` (an overestimate)."""
    p, q = as_points([p, q])
    for x in (p, q):
        if not shapely.covers(P.shape, shapely.points(x)):
            raise DisconnectedSample(f"point ({x[0]:.6g}, {x[1]:.6g}) is outside the polygon")
    if np.allclose(p, q, atol=0, rtol=0):
        return 0.0
    if shapely.covers(P.shape, shapely.linestrings([p, q])):
        return float(np.hypot(*(q - p)))
    G = grid_graph(P, float(step), reach)
    sp, wp = _snap(P, G, p)
    sq, wq = _snap(P, G, q)
    n = len(G.nodes)
    i = np.concatenate([G.edges[:, 0], np.full(len(sp), n)])
    j = np.concatenate([G.edges[:, 1], sp])
    w = np.concatenate([G.weights, wp])
    mat = coo_matrix((w, (i, j)), shape=(n + 1, n + 1)).tocsr()
    dist = dijkstra(mat, directed=True, indices=n)
    return float(np.min(dist[sq] + wq))


# --------------------------------------------------------------------------
# coverage and exhaustive optima


def _probe_points(P: Polygon, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    A, B = P.edges
    parts = [P.vertices, 0.5 * (A + B)]
    if samples:
        parts.append(sample_points(P, samples, rng))
    return np.vstack(parts)


def sampled_coverage_gap(P: Polygon, disks, samples: int, seed: int = 0) -> float:
    """Largest (distance to nearest center - radius) over probe points; <= 0 means no gap found."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    Q = _probe_points(P, samples, seed)
    eng = engine_for(P)
    C = as_points([d.center for d in disks])
    R = np.array([d.radius for d in disks], dtype=float)
    return float(np.max(np.min(eng.pairwise(C, Q) - R[:, None], axis=0)))


def _min_max_subset(D: np.ndarray, k: int, best: float = np.inf):
    """k-subset of rows minimizing max over columns of the row-wise minimum.

    Depth-first over the first k-1 rows; the last row is filtered column by
    column against the incumbent, starting with the worst-covered column.
    """
    N = len(D)
    arg = None

    def rec(start, m, chosen):
        nonlocal best, arg
        if len(chosen) == k - 1:
            cand = np.arange(start, N)
            U = np.nonzero(m >= best)[0]
            for e in U[np.argsort(-m[U])]:
                cand = cand[D[cand, e] < best]
                if not len(cand):
                    return
            if not len(cand):
                return
            vals = np.minimum(m[None], D[cand]).max(axis=1)
            t = int(np.argmin(vals))
            if vals[t] < best:
                best, arg = float(vals[t]), chosen + [int(cand[t])]
            return
        for i in range(start, N - (k - 1 - len(chosen))):
            rec(i + 1, np.minimum(m, D[i]), chosen + [i])

    rec(0, np.full(D.shape[1], np.inf), [])
    return best, arg


def _cover_search(P: Polygon, k: int, G: np.ndarray, Q: np.ndarray, limit):
    if limit is not None and math.comb(len(G), k) > limit:
        raise TooManyCandidates(f"C({len(G)}, {k}) candidate subsets exceed {limit:g}")
    if len(G) < k:
        raise TooManyCandidates(f"only {len(G)} lattice candidates for k={k}")
    eng = engine_for(P)
    D = eng.pairwise(G, Q)
    # upper bound from farthest-first seeds speeds up pruning
    seed = gonzalez_placement(P, k)
    D0 = eng.pairwise(as_points(seed.centers), Q)
    _, arg = _min_max_subset(D, k, float(D0.min(axis=0).max()) + 1.0)
    centers = G[arg]
    return covering_radius(P, centers), centers


def brute_force_k_cover(P: Polygon, k: int, grid_step: float, limit: float | None = 1e6, return_centers=False):
    """Best covering radius over k-subsets of lattice centers."""
    G = np.vstack([grid_points(P, grid_step), P.vertices])
    G = np.unique(np.round(G, 12), axis=0)
    Q = np.vstack([G, boundary_points(P, grid_step / 2)])
    r, C = _cover_search(P, k, G, Q, limit)
    return (r, C) if return_centers else r


def brute_force_two_cover(P: Polygon, grid_step: float, return_centers=False):
    """Best two-disk covering radius over lattice center pairs of a simple polygon.

    Coverage of a simple polygon by two disks is decided on its boundary, so
    the candidates are scored on dense boundary samples only.
    """
    G = np.vstack([grid_points(P, grid_step), P.vertices])
    G = np.unique(np.round(G, 12), axis=0)
    Q = np.vstack([P.vertices, boundary_points(P, grid_step / 4)])
    r, C = _cover_search(P, 2, G, Q, None)
    return (r, C) if return_centers else r


def brute_force_k_pack_radius(P: Polygon, k: int, grid_step: float, limit: float | None = 1e6) -> float:
    """Largest half min-pairwise distance over k-subsets of lattice points and vertices."""
    if k < 2:
        raise ValueError("k must be at least 2")
    G = np.vstack([grid_points(P, grid_step), P.vertices])
    G = np.unique(np.round(G, 12), axis=0)
    if limit is not None and math.comb(len(G), k) > limit:
        raise TooManyCandidates(f"C({len(G)}, {k}) candidate subsets exceed {limit:g}")
    D = engine_for(P).pairwise(G, G)
    # maximizing the minimum distance is minimizing the maximum of -D over a clique
    best = -np.inf

    def rec(start, m, chosen):
        nonlocal best
        if len(chosen) == k - 1:
            vals = np.minimum(m, D[chosen][:, start:].min(axis=0)) if chosen else D[0, start:]
            if len(vals):
                best = max(best, float(vals.max()))
            return
        for i in range(start, len(G)):
            mi = m if not chosen else min(m, float(D[chosen, i].min()))
            if mi <= best:
                continue
            rec(i + 1, mi, chosen + [i])

    rec(0, np.inf, [])
    return best / 2.0


# --------------------------------------------------------------------------
# property suites


@dataclass
class PropertyResult:
    name: str
    passed: bool
    checked: int = 0
    witness: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"PROPERTY {self.name} {status}"
        if self.witness:
            out += f" {self.witness}"
        return out


@dataclass
class PropertyReport:
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list:
        return [r.line() for r in self.results]

    def __getitem__(self, name: str) -> PropertyResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def summary(self) -> str:
        ok = sum(r.passed for r in self.results)
        return f"{ok}/{len(self.results)} properties hold"


def _tol(x) -> np.ndarray:
    return 1e-9 * np.maximum(1.0, np.abs(x))


def _metric_suite(P, eng, rng, budget):
    pool = np.vstack([sample_points(P, max(budget // 3, 10), rng), P.vertices])
    D = eng.pairwise(pool, pool)
    out = []
    asym = np.abs(D - D.T)
    i, j = np.unravel_index(np.argmax(asym - _tol(D)), D.shape)
    ok = bool(np.all(asym <= _tol(D)))
    out.append(PropertyResult("metric.symmetry", ok, D.size, "" if ok else f"d(p{i},p{j})-d(p{j},p{i})={asym[i, j]:.3e}"))
    diag = np.abs(np.diag(D))
    out.append(PropertyResult("metric.identity", bool(np.all(diag <= 1e-9)), len(diag), ""))

    m = len(pool)
    T = rng.integers(0, m, size=(budget, 3))
    nv = P.n
    vidx = np.arange(m - nv, m)
    T = np.vstack([T, np.array(list(itertools.product(vidx, repeat=3)))])
    a, b, c = T.T
    excess = D[a, c] - D[a, b] - D[b, c]
    k = int(np.argmax(excess - _tol(D[a, c])))
    ok = bool(np.all(excess <= _tol(D[a, c])))
    wit = "" if ok else f"d(a,c)-d(a,b)-d(b,c)={excess[k]:.3e} at a={pool[a[k]].round(6).tolist()} b={pool[b[k]].round(6).tolist()} c={pool[c[k]].round(6).tolist()}"
    out.append(PropertyResult("metric.triangle", ok, len(T), wit))

    if P.has_holes is False and not np.any(P.reflex):
        E = np.hypot(pool[:, None, 0] - pool[None, :, 0], pool[:, None, 1] - pool[None, :, 1])
        rel = np.abs(D - E) / np.maximum(E, 1e-300)
        rel[E == 0] = np.abs(D[E == 0])
        ok = bool(np.all(rel <= 1e-12))
        out.append(PropertyResult("metric.convex_euclidean", ok, D.size, "" if ok else f"max relative error {rel.max():.3e}"))
    return out


def _quad_suite(P, eng, rng, budget):
    pool = np.vstack([sample_points(P, 40, rng), P.vertices])
    D = eng.pairwise(pool, pool)
    paths = {}

    def path(i, j):
        key = (min(i, j), max(i, j))
        if key not in paths:
            w = eng.shortest_path(pool[key[0]], pool[key[1]]).waypoints
            paths[key] = shapely.linestrings([(p.x, p.y) for p in w]) if len(w) > 1 else shapely.points(pool[key[0]])
        return paths[key]

    checked, worst, wit = 0, -np.inf, ""
    for a, b, c, d in rng.integers(0, len(pool), size=(max(budget // 5, 20), 4)):
        if len({a, b, c, d}) < 4 or not shapely.intersects(path(a, c), path(b, d)):
            continue
        checked += 1
        diag = D[a, c] + D[b, d]
        for s in (D[a, b] + D[c, d], D[a, d] + D[b, c]):
            gap = s - diag
            if gap - _tol(diag) > worst:
                worst = gap - _tol(diag)
                wit = f"sides-diagonals={gap:.3e}"
    ok = worst <= 0
    return [PropertyResult("lemma.quad_diagonals", ok, checked, "" if ok else wit)]


def _farthest_suite(P, eng, rng, budget):
    pool = sample_points(P, 60, rng)
    D = eng.pairwise(pool, pool)
    checked, ok, wit = 0, True, ""
    for v in rng.integers(0, len(pool), size=5):
        u = int(np.argmax(D[v]))
        T = rng.integers(0, len(pool), size=(max(budget // 5, 50), 3))
        x, y, z = T.T
        lhs = np.maximum(np.maximum(D[u, x], D[u, y]), D[u, z])
        rhs = np.minimum(np.minimum(D[x, y], D[x, z]), D[y, z])
        bad = lhs < rhs - _tol(rhs)
        checked += len(T)
        if bad.any():
            ok = False
            k = int(np.argmax(bad))
            wit = f"max d(u,.)={lhs[k]:.6g} < min pairwise={rhs[k]:.6g}"
    return [PropertyResult("lemma.farthest_point", ok, checked, wit)]


def _two_disk_suites(P, eng, rng, budget):
    from .two_cover import uncovered_edges

    if P.has_holes:
        return []
    pool = sample_points(P, 40, rng)
    out = []
    counts, ok, wit = [], True, ""
    for a, b in rng.integers(0, len(pool), size=(max(budget // 25, 8), 2)):
        C = pool[[a, b]]
        r = float(eng.pairwise(C, P.vertices).min(axis=0).max())
        try:
            counts.append(len(uncovered_edges(P, GeodesicDisk(tuple(C[0]), r), GeodesicDisk(tuple(C[1]), r))))
        except InvariantViolation as exc:
            ok, wit = False, str(exc)
    out.append(PropertyResult("lemma.two_uncovered_edges", ok, len(counts), wit or f"max={max(counts, default=0)}"))

    h = 0.005 * P.bbox_diagonal
    Bd = boundary_points(P, h)
    Q = sample_points(P, max(budget, 100), rng)
    ok, wit, n = True, "", 0
    for a, b in rng.integers(0, len(pool), size=(max(budget // 50, 5), 2)):
        C = pool[[a, b]]
        # distance is 1-Lipschitz, so this radius covers the whole boundary
        r = float(eng.pairwise(C, Bd).min(axis=0).max()) + h / 2
        gap = float(eng.pairwise(C, Q).min(axis=0).max() - r)
        n += len(Q)
        if gap > 1e-9 * max(1.0, r):
            ok, wit = False, f"interior point {gap:.3e} beyond radius {r:.6g}"
    out.append(PropertyResult("lemma.boundary_covers_interior", ok, n, wit))
    return out


def _ratio_suite(P, rng):
    out = []
    ok, wit, n = True, "", 0
    for k in (1, 2, 3, 4):
        pl = gonzalez_placement(P, k)
        n += 1
        if pl.certificate_delta < pl.covering_radius - 1e-9 * max(1, pl.covering_radius):
            ok = False
            wit = f"k={k} delta={pl.certificate_delta:.6g} < radius={pl.covering_radius:.6g}"
    out.append(PropertyResult("ratio.gonzalez_certificate", ok, n, wit))

    ok, wit = True, ""
    for k in (2, 3):
        _, s = k_pack(P, k)
        r = gonzalez_placement(P, k).covering_radius
        if s > 2 * r + 1e-9:
            ok, wit = False, f"k={k} pack radius {s:.6g} > 2*cover radius {r:.6g}"
    out.append(PropertyResult("ratio.pack_vs_cover", ok, 2, wit))

    if not P.has_holes:
        r = P.bbox_diagonal / 8
        res = greedy_packing(P, r)
        ok = verify_packing(P, res.centers, r)
        out.append(PropertyResult("ratio.greedy_packing_valid", ok, res.K, f"K={res.K}"))
    return out


def property_suites(
    P: Polygon, sample_budget: int = 500, suite: str = "all", seed: int = 0, engine: GeodesicEngine | None = None
) -> PropertyReport:
    """Run randomized property checks; failures become report entries with witnesses.

    ``engine`` substitutes the distance engine for the metric and lemma
    suites, which is how fault injection is tested.
    """
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of all, {', '.join(SUITES)}")
    eng = engine if engine is not None else engine_for(P)
    report = PropertyReport()
    if suite in ("all", "metric"):
        report.results += _metric_suite(P, eng, np.random.default_rng(seed), sample_budget)
    if suite in ("all", "lemmas"):
        report.results += _quad_suite(P, eng, np.random.default_rng(seed + 1), sample_budget)
        report.results += _farthest_suite(P, eng, np.random.default_rng(seed + 2), sample_budget)
        report.results += _two_disk_suites(P, eng, np.random.default_rng(seed + 3), sample_budget)
    if suite in ("all", "ratios"):
        report.results += _ratio_suite(P, np.random.default_rng(seed + 4))
    return report


def mutated_engine(P: Polygon, factor: float = 1.1, seed: int = 0) -> GeodesicEngine:
    """Engine with one visibility edge weight scaled by ``factor``.

    First and last hops of a geodesic are measured directly, so a weight only
    matters on a link between two bends. The edge is drawn (by ``seed``) among
    links whose corruption changes some vertex-to-vertex distance.
    """
    base = engine_for(P)
    V = P.vertices
    ref = base.pairwise(V, V)
    reflex = P.reflex
    order = np.random.default_rng(seed).permutation(len(base.graph.edges))
    for k in order:
        a, b = map(int, base.graph.edges[k])
        if not (reflex[a] and reflex[b]):
            continue
        eng = GeodesicEngine(P, base.eps, weight_scale={(a, b): factor})
        if np.max(np.abs(eng.pairwise(V, V) - ref)) > 1e-9:
            return eng
    raise ValueError("no visibility edge lies between two bends of a geodesic; the fault would be unobservable")
