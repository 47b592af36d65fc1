"""Estimator-style wrappers around the detection methods.

Each detector follows the fit/predict protocol: fit stores the reference
window, predict labels one or more candidate windows as same (0) or
different (1) from the reference. decision_function exposes the
underlying statistic or p-value.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .conformal import (
    DEFAULT_EPSILON,
    DEFAULT_LAMBDA,
    DEFAULT_RESET_FLOOR,
    DEFAULT_T,
    NEAREST_NEIGHBOR,
    MartingaleState,
    Transducer,
    martingale_step,
)
from .detectors import DIFFERENT, MeasureQuorum, QuorumConfig
from .errors import ArgumentError
from .measures import DEFAULT_QUORUM_MEASURES
from .mmd import mmd_test
from .ncd import NcdConfig, ncd_test
from .ordering import ecdf_from_partition, ordered_partition

__all__ = [
    "OrderedCdfDetector",
    "NcdDetector",
    "MmdDetector",
    "MartingaleDetector",
]


def _check_window(X):
    return check_array(X, ensure_2d=True, dtype=np.float64)


class _WindowDetector(BaseEstimator):
    """Shared fit/predict plumbing for reference-vs-window detectors."""

    def fit(self, X, y=None):
        X = _check_window(X)
        self.reference_ = X
        self.n_features_in_ = X.shape[1]
        return self

    def _check_predict(self, X):
        check_is_fitted(self, "reference_")
        X = _check_window(X)
        if X.shape[1] != self.n_features_in_:
            raise ArgumentError(
                f"window has {X.shape[1]} features, reference has {self.n_features_in_}"
            )
        return X

    def predict(self, X):
        """1 when the window differs from the reference, else 0."""
        self._check_predict(X)
        return np.array([int(self._differs(X))])

    def _differs(self, window):
        raise NotImplementedError


class OrderedCdfDetector(_WindowDetector):
    """Topological-ordering CDF comparison under a measure quorum."""

    def __init__(
        self,
        method="poset",
        measures=DEFAULT_QUORUM_MEASURES,
        disagreement=0.2,
        alpha=0.05,
        tables=None,
    ):
        self.method = method
        self.measures = measures
        self.disagreement = disagreement
        self.alpha = alpha
        self.tables = tables

    def _quorum(self):
        config = QuorumConfig(
            measures=tuple(self.measures), disagreement=self.disagreement, alpha=self.alpha
        )
        return MeasureQuorum(config, tables=self.tables)

    def evaluate(self, X):
        """Per-measure outcomes for one window against the reference."""
        X = self._check_predict(X)
        partition = ordered_partition(self.reference_, X, self.method)
        f_r = ecdf_from_partition(partition, "R")
        f_w = ecdf_from_partition(partition, "W")
        return self._quorum().evaluate_ecdfs(f_r, f_w)

    def _differs(self, window):
        quorum = self._quorum()
        partition = ordered_partition(self.reference_, window, self.method)
        f_r = ecdf_from_partition(partition, "R")
        f_w = ecdf_from_partition(partition, "W")
        outcomes = quorum.evaluate_ecdfs(f_r, f_w)
        return quorum.verdict(outcomes) == DIFFERENT

    def decision_function(self, X):
        """Fraction of measures rejecting."""
        outcomes = self.evaluate(X)
        return np.array([sum(o.reject for o in outcomes) / len(outcomes)])


class NcdDetector(_WindowDetector):
    """Compression-distance comparison with swap-bootstrap significance."""

    def __init__(self, bootstrap_runs=100, swap_fraction=0.5, alpha=0.05, seed=0):
        self.bootstrap_runs = bootstrap_runs
        self.swap_fraction = swap_fraction
        self.alpha = alpha
        self.seed = seed

    def _result(self, window):
        config = NcdConfig(
            bootstrap_runs=self.bootstrap_runs,
            swap_fraction=self.swap_fraction,
            seed=self.seed,
        )
        return ncd_test(self.reference_, window, config, self.alpha)

    def _differs(self, window):
        return self._result(window).reject

    def decision_function(self, X):
        X = self._check_predict(X)
        return np.array([self._result(X).p_value])


class MmdDetector(_WindowDetector):
    """Kernel MMD two-sample test, quadratic or linear estimator."""

    def __init__(self, estimator="quadratic", alpha=0.05, permutations=200, seed=0):
        self.estimator = estimator
        self.alpha = alpha
        self.permutations = permutations
        self.seed = seed

    def _result(self, window):
        return mmd_test(
            self.reference_,
            window,
            estimator=self.estimator,
            alpha=self.alpha,
            permutations=self.permutations,
            seed=self.seed,
        )

    def _differs(self, window):
        return self._result(window).reject

    def decision_function(self, X):
        X = self._check_predict(X)
        return np.array([self._result(X).value])


class MartingaleDetector(BaseEstimator):
    """Point-streaming Martingale detector.

    fit consumes the reference window into the transducer; predict walks
    a stream of points and returns a 0/1 change flag per point.
    """

    def __init__(
        self,
        strangeness=NEAREST_NEIGHBOR,
        epsilon=DEFAULT_EPSILON,
        lam=DEFAULT_LAMBDA,
        t=DEFAULT_T,
        reset_floor=DEFAULT_RESET_FLOOR,
    ):
        self.strangeness = strangeness
        self.epsilon = epsilon
        self.lam = lam
        self.t = t
        self.reset_floor = reset_floor

    def fit(self, X, y=None):
        X = _check_window(X)
        if len(X) < 2:
            raise ArgumentError("reference must hold at least 2 points")
        self.transducer_ = Transducer(len(X), self.strangeness)
        for row in X:
            self.transducer_.warm_up(row)
        self.state_ = MartingaleState(
            epsilon=self.epsilon, lam=self.lam, t=self.t, reset_floor=self.reset_floor
        )
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "transducer_")
        X = _check_window(X)
        flags = np.empty(len(X), dtype=np.int64)
        self.martingale_path_ = np.empty(len(X))
        for i, row in enumerate(X):
            p = self.transducer_.step(row)
            verdict = martingale_step(self.state_, p)
            flags[i] = int(verdict.change)
            self.martingale_path_[i] = verdict.m
        return flags
