import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from driftscan.errors import ArgumentError
from driftscan.estimators import (
    MartingaleDetector,
    MmdDetector,
    NcdDetector,
    OrderedCdfDetector,
)

RNG = np.random.default_rng(8)
REF = RNG.standard_normal((150, 2))
SAME = RNG.standard_normal((150, 2))
SHIFTED = RNG.standard_normal((150, 2)) + 3.0

WINDOW_DETECTORS = [
    OrderedCdfDetector,
    NcdDetector,
    MmdDetector,
]


@pytest.mark.parametrize("cls", WINDOW_DETECTORS + [MartingaleDetector])
def test_params_round_trip_and_clone(cls):
    est = cls()
    params = est.get_params()
    est.set_params(**params)
    cloned = clone(est)
    assert cloned.get_params() == params


@pytest.mark.parametrize("cls", WINDOW_DETECTORS)
def test_predict_before_fit_raises(cls):
    with pytest.raises(NotFittedError):
        cls().predict(SAME)


@pytest.mark.parametrize("cls", WINDOW_DETECTORS)
def test_fit_predict_labels(cls):
    est = cls().fit(REF)
    assert est.n_features_in_ == 2
    assert est.predict(SAME).tolist() == [0]
    assert est.predict(SHIFTED).tolist() == [1]


@pytest.mark.parametrize("cls", WINDOW_DETECTORS)
def test_feature_mismatch_rejected(cls):
    est = cls().fit(REF)
    with pytest.raises(ArgumentError):
        est.predict(np.zeros((10, 5)))


def test_ordered_detector_decision_function(tables):
    est = OrderedCdfDetector(tables=tables).fit(REF)
    low = est.decision_function(SAME)[0]
    high = est.decision_function(SHIFTED)[0]
    assert 0.0 <= low <= 1.0
    assert high > low
    outcomes = est.evaluate(SHIFTED)
    assert len(outcomes) == len(est.measures)


def test_ncd_detector_decision_is_p_value():
    est = NcdDetector(seed=3).fit(REF)
    p = est.decision_function(SHIFTED)[0]
    assert 0.0 <= p <= 1.0


def test_mmd_detector_linear_estimator():
    est = MmdDetector(estimator="linear").fit(REF)
    assert est.predict(SHIFTED).tolist() == [1]


def test_martingale_detector_stream():
    # average-distance strangeness keeps novel points strange long enough
    # for the betting martingale to cross its alarm threshold
    est = MartingaleDetector(strangeness="avg").fit(REF)
    calm = RNG.standard_normal((100, 2))
    flags = est.predict(calm)
    assert flags.shape == (100,)
    assert est.martingale_path_.shape == (100,)
    loud = RNG.standard_normal((300, 2)) + 5.0
    assert est.predict(loud).max() == 1


def test_martingale_detector_needs_two_points():
    with pytest.raises(ArgumentError):
        MartingaleDetector().fit(np.zeros((1, 2)))
