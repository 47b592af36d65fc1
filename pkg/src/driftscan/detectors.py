"""Scan harness: reference window vs moving window, under a measure quorum.

A block scan slides a window along the series and compares it against a
fixed reference with one of the detection methods (ordered-CDF quorum,
compression distance, kernel MMD); the Martingale scan walks point by
point. Shared evaluation metrics (rejection ratio, error count) live here
too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ArgumentError
from . import calibration as _calibration
from .conformal import (
    AVERAGE_DISTANCE,
    DEFAULT_EPSILON,
    DEFAULT_LAMBDA,
    DEFAULT_RESET_FLOOR,
    DEFAULT_T,
    NEAREST_NEIGHBOR,
    MartingaleState,
    Transducer,
    martingale_step,
    maybe_reset,
)
from .measures import (
    DEFAULT_QUORUM_MEASURES,
    MeasureOutcome,
    baseline_stat,
    ecdf_from_samples,
    get_spec,
    is_baseline,
    measure_eval,
)
from .mmd import mmd_test
from .ncd import NcdConfig, ncd_test
from .ordering import ecdf_from_partition, ordered_partition
from .series import Series, Window, window_view

__all__ = [
    "SAME",
    "DIFFERENT",
    "QuorumConfig",
    "MeasureQuorum",
    "quorum_verdict",
    "ScanPlan",
    "ScanRecord",
    "block_scan",
    "martingale_scan",
    "rejection_ratio",
    "error_count",
    "earliest_detection",
    "default_tables",
    "BLOCK_METHODS",
]

SAME = "same"
DIFFERENT = "different"

BLOCK_METHODS = ("poset", "mst", "ncd", "mmd_u2", "mmd_l2")
DEFAULT_DISAGREEMENT = 0.2
DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class QuorumConfig:
    measures: tuple = DEFAULT_QUORUM_MEASURES
    disagreement: float = DEFAULT_DISAGREEMENT
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if not self.measures:
            raise ArgumentError("quorum needs at least one measure")
        if not 0.0 < self.disagreement <= 1.0:
            raise ArgumentError("disagreement must be in (0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ArgumentError("alpha must be in (0, 1)")
        for mid in self.measures:
            if not is_baseline(mid) and not get_spec(mid).calibratable:
                raise ArgumentError(f"measure {mid!r} is neither calibratable nor a baseline")


def quorum_verdict(outcomes, config: QuorumConfig) -> str:
    """different iff the rejection count reaches ceil(disagreement * n).

    With ten measures at disagreement 0.2 this is the two-of-ten rule.
    """
    have = {o.id for o in outcomes}
    missing = [m for m in config.measures if m not in have]
    if missing:
        raise ArgumentError(f"missing outcomes for {missing}")
    rejections = sum(1 for o in outcomes if o.reject)
    needed = math.ceil(config.disagreement * len(config.measures))
    return DIFFERENT if rejections >= needed else SAME


@lru_cache(maxsize=4)
def default_tables(m=500, seed=0):
    """Shared process-wide calibration tables for the default quorum."""
    return _calibration.build_tables(window_sizes=(100, 250, 500, 1000), m=m, seed=seed)


class MeasureQuorum:
    """Evaluate a measure set over two 1-D samples and take the quorum vote."""

    def __init__(self, config: QuorumConfig | None = None, tables=None):
        self.config = config or QuorumConfig()
        self._tables = tables

    @property
    def tables(self):
        if self._tables is None:
            self._tables = default_tables()
        return self._tables

    def evaluate(self, r_samples, w_samples):
        """One MeasureOutcome per configured measure, with p and verdict."""
        r_samples = np.asarray(r_samples, dtype=np.float64).ravel()
        w_samples = np.asarray(w_samples, dtype=np.float64).ravel()
        f_r = ecdf_from_samples(r_samples)
        f_w = ecdf_from_samples(w_samples)
        return self._evaluate(f_r, f_w, r_samples, w_samples)

    def evaluate_ecdfs(self, f_r, f_w, r_samples=None, w_samples=None):
        """Evaluate from precomputed ECDFs; baselines need raw samples."""
        return self._evaluate(f_r, f_w, r_samples, w_samples)

    def _evaluate(self, f_r, f_w, r_samples, w_samples):
        outcomes = []
        alpha = self.config.alpha
        for mid in self.config.measures:
            if is_baseline(mid):
                if r_samples is None or w_samples is None:
                    raise ArgumentError(f"baseline {mid!r} needs raw samples")
                outcomes.append(baseline_stat(mid, r_samples, w_samples, alpha))
            else:
                outcome = measure_eval(get_spec(mid), f_r, f_w)
                p = self.tables[mid].p_value(outcome.normalized)
                outcomes.append(outcome.with_significance(p, alpha))
        return outcomes

    def verdict(self, outcomes) -> str:
        return quorum_verdict(outcomes, self.config)

    def differ(self, r_samples, w_samples) -> bool:
        return self.verdict(self.evaluate(r_samples, w_samples)) == DIFFERENT


@dataclass(frozen=True)
class ScanPlan:
    reference: Window
    step: int = 1
    method: str = "poset"
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.step < 1:
            raise ArgumentError("step must be >= 1")
        if self.method not in BLOCK_METHODS + ("martingale",):
            raise ArgumentError(f"unknown method {self.method!r}")
        if self.method == "martingale" and self.step != 1:
            raise ArgumentError("the martingale method scans one point at a time")


@dataclass
class ScanRecord:
    window_start: int
    method: str
    raw: float
    normalized: float
    p_value: float | None
    verdict: str
    outcomes: list = field(default_factory=list)

    def to_row(self):
        return {
            "window_start": self.window_start,
            "method": self.method,
            "raw": self.raw,
            "normalized": self.normalized,
            "p_value": self.p_value,
            "verdict": self.verdict,
        }


def _partition_pseudo_samples(partition, origin):
    """Traversal positions repeated per origin multiplicity (for baselines)."""
    out = []
    for pos, node in partition.positions():
        c = node.count_r if origin == "R" else node.count_w
        out.extend([pos] * c)
    return np.asarray(out, dtype=np.float64)


def _scan_positions(series_len, ref: Window, step: int, window_len: int):
    if ref.stop > series_len:
        raise ArgumentError("reference window out of bounds")
    starts = range(ref.stop, series_len - window_len + 1, step)
    if not starts:
        raise ArgumentError("no scan positions fit after the reference")
    return starts


def _ordered_record(method, r_data, w_data, start, quorum: MeasureQuorum):
    partition = ordered_partition(r_data, w_data, method)
    f_r = ecdf_from_partition(partition, "R")
    f_w = ecdf_from_partition(partition, "W")
    needs_samples = any(is_baseline(m) for m in quorum.config.measures)
    pr = _partition_pseudo_samples(partition, "R") if needs_samples else None
    pw = _partition_pseudo_samples(partition, "W") if needs_samples else None
    outcomes = quorum.evaluate_ecdfs(f_r, f_w, pr, pw)
    verdict = quorum.verdict(outcomes)
    rejections = sum(1 for o in outcomes if o.reject)
    return ScanRecord(
        window_start=start,
        method=method,
        raw=float(rejections),
        normalized=rejections / len(outcomes),
        p_value=max(o.p_value for o in outcomes),
        verdict=verdict,
        outcomes=outcomes,
    )


def block_scan(series: Series, plan: ScanPlan, quorum: MeasureQuorum | None = None, seed: int = 0):
    """Compare each window position against the fixed reference.

    The moving window has the reference's length and starts right after
    it; it advances by plan.step. Returns one ScanRecord per position.
    """
    if plan.method not in BLOCK_METHODS:
        raise ArgumentError(f"block_scan does not handle method {plan.method!r}")
    ref = plan.reference
    r_data = window_view(series, ref)
    window_len = ref.length
    cfg = plan.config
    alpha = cfg.get("alpha", DEFAULT_ALPHA)
    records = []
    if plan.method in ("poset", "mst") and quorum is None:
        quorum = MeasureQuorum(QuorumConfig(alpha=alpha))
    for pos_idx, start in enumerate(_scan_positions(len(series), ref, plan.step, window_len)):
        w_data = series.data[start : start + window_len]
        if plan.method in ("poset", "mst"):
            records.append(_ordered_record(plan.method, r_data, w_data, start, quorum))
        elif plan.method == "ncd":
            config = NcdConfig(
                bootstrap_runs=cfg.get("bootstrap_runs", 100),
                swap_fraction=cfg.get("swap_fraction", 0.5),
                seed=seed * 100003 + pos_idx,
            )
            res = ncd_test(r_data, w_data, config, alpha)
            records.append(
                ScanRecord(
                    window_start=start,
                    method="ncd",
                    raw=res.ncd,
                    normalized=res.ncd,
                    p_value=res.p_value,
                    verdict=DIFFERENT if res.reject else SAME,
                )
            )
        else:
            estimator = "quadratic" if plan.method == "mmd_u2" else "linear"
            res = mmd_test(
                r_data,
                w_data,
                estimator=estimator,
                alpha=alpha,
                permutations=cfg.get("permutations", 100),
                seed=seed * 100003 + pos_idx,
            )
            records.append(
                ScanRecord(
                    window_start=start,
                    method=plan.method,
                    raw=res.value,
                    normalized=res.value,
                    p_value=res.p_value,
                    verdict=DIFFERENT if res.reject else SAME,
                )
            )
    return records


def martingale_scan(
    series: Series,
    reference: Window,
    kind: str = NEAREST_NEIGHBOR,
    epsilon: float = DEFAULT_EPSILON,
    lam: float = DEFAULT_LAMBDA,
    t: float = DEFAULT_T,
    reset_floor: float = DEFAULT_RESET_FLOOR,
    reference_p_len: int = 100,
    check_every: int = 100,
    quorum: MeasureQuorum | None = None,
):
    """Point-by-point Martingale scan with periodic check-and-reset.

    The reference window fills the transducer; the first reference_p_len
    emitted p-values become the reference p-sequence. Every check_every
    steps thereafter the recent p-values are compared against it with the
    measure quorum, and a no-change verdict allows an out-of-range
    Martingale value to reset to 1.
    """
    if kind not in (NEAREST_NEIGHBOR, AVERAGE_DISTANCE):
        raise ArgumentError(f"unknown strangeness kind {kind!r}")
    if reference.length < 2:
        raise ArgumentError("reference must hold at least 2 points")
    if reference.stop > len(series):
        raise ArgumentError("reference window out of bounds")
    transducer = Transducer(reference.length, kind)
    for i in range(reference.start, reference.stop):
        transducer.warm_up(series.data[i])
    state = MartingaleState(
        epsilon=epsilon, lam=lam, t=t, reset_floor=reset_floor
    )
    reference_p = []
    records = []
    steps_since_check = 0
    for i in range(reference.stop, len(series)):
        p = transducer.step(series.data[i])
        verdict_info = martingale_step(state, p)
        if len(reference_p) < reference_p_len:
            reference_p.append(p)
        else:
            steps_since_check += 1
            if steps_since_check >= check_every and len(state.p_history) >= reference_p_len:
                recent = state.p_history[-reference_p_len:]
                if quorum is None:
                    quorum = MeasureQuorum()
                no_change = not quorum.differ(reference_p, recent)
                maybe_reset(state, no_change)
                steps_since_check = 0
        records.append(
            ScanRecord(
                window_start=i,
                method="martingale",
                raw=p,
                normalized=verdict_info.m,
                p_value=p,
                verdict=DIFFERENT if verdict_info.change else SAME,
            )
        )
    return records


def earliest_detection(records):
    """Start index of the first `different` record, or None."""
    for record in records:
        if record.verdict == DIFFERENT:
            return record.window_start
    return None


def rejection_ratio(earliest, series_len: int, n: int) -> float:
    """1 at the earliest possible detection (epoch 2N), 0 when never.

    Detections before epoch 2N (a rejection of the very first compared
    window, or a point-level alarm inside it) clamp to 1.
    """
    if series_len <= 2 * n:
        raise ArgumentError("series must be longer than 2N")
    if earliest is None:
        return 0.0
    earliest = max(earliest, 2 * n)
    return 1.0 - (earliest - 2 * n) / (series_len - 2 * n)


def error_count(found: int, matches: int, golden: int) -> int:
    """False positives plus false negatives against the golden count."""
    if matches > golden:
        raise ArgumentError("matches cannot exceed golden")
    return max(found - golden, 0) + max(golden - matches, 0)
