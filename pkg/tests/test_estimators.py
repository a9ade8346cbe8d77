import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from geodisk import GreedyDiskPacking, KCenterCover, KDiskPacking, TwoDiskCover, verify_packing
from geodisk.errors import PointOutsidePolygon
from geodisk.geometry import sample_points
from shapes import COMB, L_SHAPE, RECT, SQUARE


def test_k_center_cover_matches_the_solver():
    est = KCenterCover(k=2).fit(SQUARE)
    assert est.n_centers_ == 2
    assert est.radius_ == pytest.approx(1.0)
    assert est.lower_bound_ == pytest.approx(est.certificate_delta_ / 2)


def test_transform_and_predict():
    est = KCenterCover(k=3).fit(COMB)
    X = sample_points(COMB, 50, np.random.default_rng(0))
    D = est.transform(X)
    assert D.shape == (50, 3)
    assert (est.predict(X) == D.argmin(axis=1)).all()
    assert est.covers(X).all()


def test_fit_accepts_raw_rings():
    est = KCenterCover(k=1).fit({"outer": [[0, 0], [1, 0], [1, 1], [0, 1]]})
    assert est.radius_ == pytest.approx(math.sqrt(2))


def test_fit_predict_labels_the_centers():
    labels = KCenterCover(k=3).fit_predict(L_SHAPE)
    assert sorted(labels.tolist()) == [0, 1, 2]


def test_greedy_packing_estimator():
    est = GreedyDiskPacking(radius=0.5).fit(COMB)
    assert verify_packing(COMB, est.centers_, 0.5)
    assert len(est.steps_) == est.n_centers_


def test_k_disk_packing_estimator():
    est = KDiskPacking(k=2).fit(SQUARE)
    assert est.radius_ == pytest.approx(math.sqrt(2) / 2)


def test_two_disk_cover_decision_and_minimum():
    yes = TwoDiskCover(radius=0.72).fit(RECT)
    assert yes.feasible_ and yes.centers_.shape == (2, 2)
    no = TwoDiskCover(radius=0.70).fit(RECT)
    assert not no.feasible_ and no.centers_.shape == (0, 2)
    best = TwoDiskCover(eps=1e-2).fit(L_SHAPE)
    assert best.lower_bound_ <= best.radius_ <= best.lower_bound_ + 1e-2


def test_clone_and_params():
    est = KCenterCover(k=4, approx_grid=0.1)
    assert est.get_params() == {"k": 4, "approx_grid": 0.1}
    twin = clone(est).set_params(k=2)
    assert twin.k == 2 and est.k == 4


def test_unfitted_and_bad_input():
    with pytest.raises(NotFittedError):
        KCenterCover().transform([[0.5, 0.5]])
    est = KCenterCover(k=1).fit(L_SHAPE)
    with pytest.raises(PointOutsidePolygon):
        est.transform([[1.5, 1.5]])
    with pytest.raises(ValueError):
        est.transform([[0.5, 0.5, 0.5]])
