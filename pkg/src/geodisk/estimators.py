"""Estimator-style wrappers around the packing and covering solvers.

Each estimator is fitted to a polygon and then behaves like a clustering
model over points of that polygon: ``transform`` gives geodesic distances to
the fitted centers and ``predict`` the index of the nearest one.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .covering import gonzalez_placement, k_pack
from .engine import engine_for
from .geometry import Polygon, validate_polygon
from .packing import greedy_packing
from .two_cover import min_two_cover, test_two_disk_cover


def check_polygon(P) -> Polygon:
    """Accept a :class:`Polygon`, a ``{"outer", "holes"}`` mapping or a ring list."""
    return P if isinstance(P, Polygon) else validate_polygon(P)


def check_points(X, P: Polygon | None = None) -> np.ndarray:
    """Finite (m, 2) float array; checked to lie in ``P`` when given."""
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected points with 2 coordinates, got {X.shape[1]}")
    if P is not None:
        engine_for(P)._check_inside(X)
    return X


class _CenterModel(ClusterMixin, TransformerMixin, BaseEstimator):
    """Shared behaviour once ``centers_`` and ``radius_`` are set."""

    def _solve(self, P: Polygon):
        raise NotImplementedError

    def fit(self, P, y=None):
        P = check_polygon(P)
        self.polygon_ = P
        self._solve(P)
        self.n_centers_ = len(self.centers_)
        return self

    def transform(self, X):
        check_is_fitted(self, "centers_")
        X = check_points(X, self.polygon_)
        if not len(self.centers_):
            return np.zeros((len(X), 0))
        return engine_for(self.polygon_).pairwise(self.centers_, X).T

    def predict(self, X):
        return np.argmin(self.transform(X), axis=1)

    def fit_predict(self, P, y=None, X=None):
        self.fit(P)
        return self.predict(self.centers_ if X is None else X)

    def covers(self, X) -> np.ndarray:
        """Whether each point lies in some fitted disk."""
        return self.transform(X).min(axis=1) <= self.radius_ + 1e-9 * max(1.0, self.radius_)


class GreedyDiskPacking(_CenterModel):
    """Greedy packing of geodesic disks of a fixed radius (simple polygons)."""

    def __init__(self, radius: float = 1.0):
        self.radius = radius

    def _solve(self, P):
        res = greedy_packing(P, self.radius)
        self.centers_ = np.array(res.centers, dtype=float).reshape(-1, 2)
        self.radius_ = float(self.radius)
        self.steps_ = res.step_log


class KCenterCover(_CenterModel):
    """Farthest-first k-cover; ``radius_`` is at most twice the optimum."""

    def __init__(self, k: int = 2, approx_grid: float | None = None):
        self.k = k
        self.approx_grid = approx_grid

    def _solve(self, P):
        res = gonzalez_placement(P, self.k, self.approx_grid)
        self.centers_ = np.array(res.centers, dtype=float)
        self.radius_ = res.covering_radius
        self.certificate_delta_ = res.certificate_delta
        self.lower_bound_ = res.certificate_delta / 2.0


class KDiskPacking(_CenterModel):
    """k disjoint disks of common radius at least a quarter of the optimum."""

    def __init__(self, k: int = 2, approx_grid: float | None = None):
        self.k = k
        self.approx_grid = approx_grid

    def _solve(self, P):
        centers, s = k_pack(P, self.k, self.approx_grid)
        self.centers_ = np.array(centers, dtype=float)
        self.radius_ = s


class TwoDiskCover(_CenterModel):
    """Two geodesic disks covering a simple polygon.

    With ``radius`` set, fitting decides feasibility at that radius
    (``feasible_`` may be False and then no centers are stored); otherwise
    the minimum radius is found to within ``eps``.
    """

    def __init__(self, radius: float | None = None, eps: float | None = None):
        self.radius = radius
        self.eps = eps

    def _solve(self, P):
        if self.radius is not None:
            w = test_two_disk_cover(P, self.radius)
            self.feasible_ = w is not None
            self.radius_ = float(self.radius)
            self.lower_bound_ = None
        else:
            w = min_two_cover(P, self.eps)
            self.feasible_ = True
            self.radius_ = w.r
            self.lower_bound_ = w.lower
        self.witness_ = w
        self.centers_ = np.array([w.c1, w.c2], dtype=float) if w is not None else np.zeros((0, 2))
