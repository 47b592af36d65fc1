"""Strangeness transducer and Martingale change test.

A sliding buffer of recent points turns each new observation into a
p-value (the fraction of buffered points at least as strange), and a
power Martingale bets against the uniformity of those p-values. Sustained
small p-values make the Martingale grow exponentially; crossing the
threshold, or jumping by more than a step bound, signals a change.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, StateError

__all__ = [
    "NEAREST_NEIGHBOR",
    "AVERAGE_DISTANCE",
    "strangeness_scores",
    "Transducer",
    "MartingaleState",
    "martingale_step",
    "maybe_reset",
    "pi_distribution_check",
    "MartingaleVerdict",
]

NEAREST_NEIGHBOR = "nn"
AVERAGE_DISTANCE = "avg"

DEFAULT_LAMBDA = 20.0
DEFAULT_EPSILON = 0.95
DEFAULT_T = 3.0
DEFAULT_RESET_FLOOR = 1e-6


def strangeness_scores(points, kind=NEAREST_NEIGHBOR):
    """Per-point strangeness within a set, self excluded.

    nn: distance to the nearest other point. avg: mean distance to all
    other points. Permutation equivariant by construction.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = len(points)
    if n < 2:
        raise ArgumentError("need at least 2 points")
    diff = points[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    if kind == NEAREST_NEIGHBOR:
        np.fill_diagonal(dist, np.inf)
        return dist.min(axis=1)
    if kind == AVERAGE_DISTANCE:
        np.fill_diagonal(dist, 0.0)
        return dist.sum(axis=1) / (n - 1)
    raise ArgumentError(f"unknown strangeness kind {kind!r}")


class Transducer:
    """Sliding-window transducer emitting one p-value per new point.

    Keeps the last N points with their pairwise distances (O(N^2) space)
    so each step costs O(N): one distance row for the new point, plus an
    incremental repair of the cached per-row nearest-neighbor and
    distance-sum statistics.
    """

    def __init__(self, n, kind=NEAREST_NEIGHBOR):
        if n < 2:
            raise ArgumentError("buffer size must be at least 2")
        if kind not in (NEAREST_NEIGHBOR, AVERAGE_DISTANCE):
            raise ArgumentError(f"unknown strangeness kind {kind!r}")
        self.n = int(n)
        self.kind = kind
        self._points = None  # (n, d) slot array; slot order is arbitrary
        self._dist = None  # pairwise distances aligned with slots
        self._order = []  # slots from oldest to newest
        self._count = 0
        # cached per-slot statistics over the other buffered points
        self._nn_dist = None
        self._nn_idx = None
        self._row_sum = None

    @property
    def full(self):
        return self._count == self.n

    def warm_up(self, point):
        """Feed a reference point while the buffer is filling."""
        if self.full:
            raise StateError("buffer already full; use step()")
        self._insert(np.asarray(point, dtype=np.float64).ravel())

    def _insert(self, point):
        if self._points is None:
            self._points = np.empty((self.n, len(point)))
            self._dist = np.zeros((self.n, self.n))
            self._nn_dist = np.full(self.n, np.inf)
            self._nn_idx = np.full(self.n, -1, dtype=np.int64)
            self._row_sum = np.zeros(self.n)
        if self.full:
            slot = self._order.pop(0)
        else:
            slot = self._count
            self._count += 1
        self._order.append(slot)
        k = self._count  # slots 0..k-1 are occupied
        pts = self._points[:k]
        self._points[slot] = point
        old = self._dist[:k, slot].copy()
        d = np.sqrt(np.sum((pts - point) ** 2, axis=1))
        d[slot] = 0.0
        self._dist[:k, slot] = d
        self._dist[slot, :k] = d
        if k == 1:
            return
        d_other = d.copy()
        d_other[slot] = np.inf
        # repair neighbors' cached statistics
        self._row_sum[:k] += d - old
        better = d_other < self._nn_dist[:k]
        self._nn_dist[:k][better] = d_other[better]
        self._nn_idx[:k][better] = slot
        # rows whose nearest neighbor was the evicted occupant of this slot
        stale = np.flatnonzero((self._nn_idx[:k] == slot) & ~better)
        dist = self._dist
        for i in stale:
            if i == slot:
                continue
            row = dist[i, :k].copy()
            row[i] = np.inf
            j = int(np.argmin(row))
            self._nn_idx[i] = j
            self._nn_dist[i] = row[j]
        # fresh statistics for the inserted point
        self._row_sum[slot] = float(d.sum())
        j = int(np.argmin(d_other))
        self._nn_dist[slot] = float(d_other[j])
        self._nn_idx[slot] = j

    def step(self, point):
        """Emit p for a new point, then slide the buffer by one.

        Strangeness is computed jointly over buffer + new point with the
        point itself excluded, matching strangeness_scores on that set.
        """
        if not self.full:
            raise StateError("buffer not yet full")
        point = np.asarray(point, dtype=np.float64).ravel()
        d_new = np.sqrt(np.sum((self._points - point) ** 2, axis=1))
        if self.kind == NEAREST_NEIGHBOR:
            alpha = np.minimum(self._nn_dist, d_new)
            alpha_new = d_new.min()
        else:
            alpha = (self._row_sum + d_new) / self.n
            alpha_new = d_new.mean()
        # floor at 1: the new point itself is at least as strange as itself,
        # which keeps p in [1/N, 1] and the Martingale update finite
        p = max(int(np.count_nonzero(alpha >= alpha_new)), 1) / self.n
        self._insert(point)
        return p


@dataclass
class MartingaleVerdict:
    m: float
    delta: float
    lambda_exceeded: bool
    delta_exceeded: bool

    @property
    def change(self):
        return self.lambda_exceeded or self.delta_exceeded


@dataclass
class MartingaleState:
    epsilon: float = DEFAULT_EPSILON
    lam: float = DEFAULT_LAMBDA
    t: float = DEFAULT_T
    reset_floor: float = DEFAULT_RESET_FLOOR
    m: float = 1.0
    p_history: list = field(default_factory=list)
    reset_log: list = field(default_factory=list)
    steps: int = 0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ArgumentError("epsilon must be in (0, 1)")
        if self.lam <= 0 or self.t <= 0 or self.reset_floor <= 0:
            raise ArgumentError("lambda, t and reset_floor must be positive")


def martingale_step(state: MartingaleState, p: float) -> MartingaleVerdict:
    """Multiplicative betting update M <- eps * p^(eps-1) * M."""
    if not 0.0 < p <= 1.0:
        raise ArgumentError("p must be in (0, 1]")
    new_m = state.epsilon * p ** (state.epsilon - 1.0) * state.m
    delta = new_m - state.m
    state.m = new_m
    state.steps += 1
    state.p_history.append(p)
    return MartingaleVerdict(
        m=new_m,
        delta=delta,
        lambda_exceeded=new_m >= state.lam,
        delta_exceeded=abs(delta) >= state.t,
    )


def maybe_reset(state: MartingaleState, no_change: bool) -> bool:
    """Restart M at 1 when safe: no detected change and M out of range.

    Resetting while the p-distribution differs from reference would throw
    away evidence, so the reset happens only on a no-change verdict.
    """
    if no_change and (state.m < state.reset_floor or state.m > state.lam):
        state.reset_log.append((state.steps, state.m))
        state.m = 1.0
        return True
    return False


def pi_distribution_check(reference_p, window_p, quorum=None):
    """Compare two p-value sequences with the measure quorum.

    Returns True when the sequences come from the same distribution
    (no change). The quorum defaults to the library-wide detector quorum.
    """
    reference_p = np.asarray(reference_p, dtype=np.float64).ravel()
    window_p = np.asarray(window_p, dtype=np.float64).ravel()
    if len(reference_p) < 30 or len(window_p) < 30:
        raise ArgumentError("need at least 30 p-values per sequence")
    from .detectors import MeasureQuorum

    quorum = quorum or MeasureQuorum()
    return not quorum.differ(reference_p, window_p)
