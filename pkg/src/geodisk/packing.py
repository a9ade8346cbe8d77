"""Greedy geodesic disk packing in simple polygons.

The greedy packer keeps a finite set of candidate points. Each round it picks
a pair of candidates at maximum geodesic distance, centers a disk of twice the
packing radius at one of them, discards the candidates strictly inside that
disk, and adds the points where the new disk's boundary meets the boundary of
the union placed so far or the uncovered part of the polygon boundary. Two
radius-``2r`` disks avoid each other's centers exactly when the radius-``r``
disks at the same centers are disjoint, so the centers form a packing.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .disk import ArrangementBoundary, disk_boundary, update_arrangement
from .engine import diametral_pair, engine_for
from .errors import EmptyPolygon, NonPositiveRadius, PolygonHasHoles, TooManyCandidates
from .geometry import EPS, Point2, Polygon, as_points, contains

log = logging.getLogger(__name__)


class PackingStep(NamedTuple):
    pair: tuple  # diametral pair (u, v); the center is v
    distance: float
    candidates: int  # size of the candidate set when the pair was chosen


@dataclass
class PackingResult:
    centers: list
    radius: float
    step_log: list = field(default_factory=list)
    candidates_seen: list = field(default_factory=list)

    @property
    def K(self) -> int:
        return len(self.centers)


def _dedupe_into(existing: np.ndarray, new: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    out = existing
    for p in new:
        if len(out) == 0 or np.min(np.hypot(out[:, 0] - p[0], out[:, 1] - p[1])) > tol:
            out = np.vstack([out, p[None]]) if len(out) else p[None].copy()
    return out


def greedy_packing(P: Polygon, r: float, max_steps: int = 10_000) -> PackingResult:
    """Pack geodesic disks of radius ``r`` greedily; 2-approximate in count."""
    if P.has_holes:
        raise PolygonHasHoles("greedy packing is only defined for simple polygons")
    if P.n < 3:
        raise EmptyPolygon("polygon has no vertices")
    if not r > EPS:
        raise NonPositiveRadius(f"radius must be positive, got {r}")
    eng = engine_for(P)
    R = 2.0 * r
    tol = 1e-9 * max(1.0, R)

    V = np.array(P.vertices, dtype=float)
    arrangement = ArrangementBoundary.empty(P)
    centers: list = []
    steps: list = []
    seen = [Point2.of(p) for p in V]
    while len(V) and len(centers) < max_steps:
        u, v, d = diametral_pair(P, V)
        steps.append(PackingStep((u, v), d, len(V)))
        centers.append(v)
        c = np.array(v)
        V = V[~(eng.distances_from(c, V) < R - tol)]
        D = disk_boundary(P, c, R)
        arrangement, new_points = update_arrangement(arrangement, D)
        if new_points:
            N = as_points(new_points)
            C = np.array(centers)
            dmin = eng.pairwise(C, N).min(axis=0)
            N = N[dmin >= R - tol]
            seen.extend(Point2.of(p) for p in N)
            V = _dedupe_into(V, N)
        log.debug("step %d: center %s, %d candidates left", len(centers), v, len(V))
    return PackingResult(centers, float(r), steps, seen)


def greedy_unit_packing(P: Polygon) -> PackingResult:
    return greedy_packing(P, 1.0)


def verify_packing(P: Polygon, centers, r: float, eps: float = EPS) -> bool:
    """True iff all pairwise geodesic center distances are at least ``2 r``."""
    C = as_points(centers)
    eng = engine_for(P)
    eng._check_inside(C)
    if len(C) < 2:
        return True
    Dm = eng.pairwise(C, C)
    iu = np.triu_indices(len(C), k=1)
    return bool(np.all(Dm[iu] >= 2 * r - eps))


# --------------------------------------------------------------------------
# exact oracle on grid candidates


def grid_points(P: Polygon, step: float) -> np.ndarray:
    """Points of the axis-aligned lattice anchored at the bounding-box corner that lie in ``P``."""
    x0, y0, x1, y1 = P.bounds
    xs = x0 + step * np.arange(int(np.floor((x1 - x0) / step + 1e-9)) + 1)
    ys = y0 + step * np.arange(int(np.floor((y1 - y0) / step + 1e-9)) + 1)
    G = np.array([(x, y) for x in xs for y in ys])
    return G[contains(P, G)]


def _prune_dominated(nbr: list) -> list:
    """Drop vertices whose closed neighbourhood contains a neighbour's.

    If N[v] is a subset of N[u] for adjacent u, v then some maximum
    independent set avoids u.
    """
    alive = set(range(len(nbr)))
    changed = True
    while changed:
        changed = False
        for u in sorted(alive):
            if u not in alive:
                continue
            mask_alive = sum(1 << i for i in alive)
            Nu = nbr[u] & mask_alive
            m = Nu & ~(1 << u)
            while m:
                low = m & -m
                v = low.bit_length() - 1
                m ^= low
                Nv = nbr[v] & mask_alive
                if Nv & ~Nu == 0 and (Nv != Nu or v < u):
                    alive.discard(u)
                    changed = True
                    break
    return sorted(alive)


def max_independent_set(nbr: list, nodes: list) -> int:
    """Size of a maximum independent set; ``nbr[i]`` is the closed neighbourhood bitmask."""
    index = {v: k for k, v in enumerate(nodes)}
    N = []
    for v in nodes:
        m = 0
        for w in nodes:
            if nbr[v] >> w & 1:
                m |= 1 << index[w]
        N.append(m)
    memo: dict = {}

    def solve(mask: int) -> int:
        if mask == 0:
            return 0
        hit = memo.get(mask)
        if hit is not None:
            return hit
        best_v, best_deg = -1, None
        m = mask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            deg = bin(N[v] & mask).count("1")
            if best_deg is None or deg < best_deg:
                best_v, best_deg = v, deg
                if deg == 1:
                    break
        # some vertex of the closed neighbourhood of best_v is in every maximal set
        best = 0
        m = N[best_v] & mask
        while m:
            low = m & -m
            w = low.bit_length() - 1
            m ^= low
            best = max(best, 1 + solve(mask & ~N[w]))
        memo[mask] = best
        return best

    return solve((1 << len(nodes)) - 1)


def brute_force_max_packing(P: Polygon, r: float, grid_step: float, max_candidates: int = 64) -> int:
    """Largest radius-``r`` packing with centers on a grid (exact, exponential)."""
    G = grid_points(P, grid_step)
    if len(G) == 0:
        return 0
    eng = engine_for(P)
    Dm = eng.pairwise(G, G)
    conflict = Dm < 2 * r - EPS
    nbr = [sum(1 << int(j) for j in np.nonzero(row)[0]) | (1 << i) for i, row in enumerate(conflict)]
    nodes = _prune_dominated(nbr)
    if len(nodes) > max_candidates:
        raise TooManyCandidates(f"{len(nodes)} candidates survive pruning (limit {max_candidates})")
    return max_independent_set(nbr, nodes)
