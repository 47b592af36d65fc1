"""Benchmark protocols: synthetic sensitivity suite and 1-D window search.

The sensitivity suite scores every detection method by how early it
first rejects on the 21-block synthetic series. The 1-D suite embeds one
window equal in law to the reference into each generated series and
scores measure sets by found/match counts across disagreement levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .datagen import SyntheticPlan, UniBenchPlan, gen_synthetic, gen_unibench
from .detectors import (
    DIFFERENT,
    SAME,
    MeasureQuorum,
    QuorumConfig,
    ScanPlan,
    block_scan,
    earliest_detection,
    error_count,
    martingale_scan,
    rejection_ratio,
)
from .errors import ArgumentError
from .measures import (
    EXTENSION_SET,
    STANDARD_SET,
    baseline_stat,
    get_spec,
    is_baseline,
    measure_raw,
    pooled_from_samples,
)
from .series import Window

__all__ = [
    "SENSITIVITY_METHODS",
    "sensitivity_suite",
    "first_comparison_verdict",
    "DisagreementStats",
    "unibench_suite",
    "DISAGREEMENT_LEVELS",
    "MEASURE_SET_NAMES",
]

SENSITIVITY_METHODS = ("mmd_u2", "ncd", "mmd_l2", "poset", "mst", "martingale")
DISAGREEMENT_LEVELS = tuple(round(0.1 * k, 1) for k in range(1, 11))
MEASURE_SET_NAMES = ("standard", "extension", "combined")


def _method_rejection_ratio(series, method, n, quorum, seed):
    if method == "martingale":
        records = martingale_scan(series, Window(0, n), quorum=quorum)
    else:
        plan = ScanPlan(reference=Window(0, n), step=n, method=method)
        records = block_scan(series, plan, quorum=quorum, seed=seed)
    return rejection_ratio(earliest_detection(records), len(series), n)


def _sensitivity_one(args):
    """One benchmark run for every method; process-pool friendly."""
    kind, d, n, series_seed, methods, method_seed = args
    series, _ = gen_synthetic(SyntheticPlan(kind=kind, d=d, block_len=n, seed=series_seed))
    quorum = MeasureQuorum()
    return [_method_rejection_ratio(series, m, n, quorum, method_seed) for m in methods]


def sensitivity_suite(
    kind="average",
    d=10,
    n=250,
    runs=100,
    methods=SENSITIVITY_METHODS,
    seed=0,
    quorum=None,
    jobs=1,
):
    """Rejection ratios per method over seeded synthetic series.

    Returns {method: array of rejection ratios, one per run}. With
    jobs > 1 the runs fan out over a process pool; results merge in run
    order, so the output is identical to the sequential one.
    """
    methods = tuple(methods)
    out = {m: np.empty(runs) for m in methods}
    if jobs > 1 and quorum is None:
        from concurrent.futures import ProcessPoolExecutor

        args = [(kind, d, n, seed * 100003 + run, methods, seed + run) for run in range(runs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for run, ratios in enumerate(pool.map(_sensitivity_one, args)):
                for method, value in zip(methods, ratios):
                    out[method][run] = value
        return out
    quorum = quorum or MeasureQuorum()
    for run in range(runs):
        series, _ = gen_synthetic(SyntheticPlan(kind=kind, d=d, block_len=n, seed=seed * 100003 + run))
        for method in methods:
            out[method][run] = _method_rejection_ratio(series, method, n, quorum, seed + run)
    return out


def first_comparison_verdict(series, method, n, quorum=None, seed=0):
    """Verdict of the very first window comparison (block 2 vs block 1)."""
    plan = ScanPlan(reference=Window(0, n), step=n, method=method)
    quorum = quorum or MeasureQuorum()
    r_data = series.data[0:n]
    w_data = series.data[n : 2 * n]
    records = block_scan(
        series.__class__.from_values(np.vstack([r_data, w_data])), plan, quorum=quorum, seed=seed
    )
    return records[0].verdict


@dataclass
class DisagreementStats:
    disagreement: float
    found: int
    matches: int
    golden: int

    @property
    def error(self):
        return error_count(self.found, self.matches, self.golden)


def _measure_set(name):
    if name == "standard":
        return STANDARD_SET
    if name == "extension":
        return EXTENSION_SET
    if name == "combined":
        return STANDARD_SET + EXTENSION_SET
    raise ArgumentError(f"unknown measure set {name!r}")


def _rejections_at_position(r, w, measure_ids, tables, alpha):
    """Per-measure rejection flags for one window pair (1-D samples)."""
    x, y = pooled_from_samples(r, w)
    n = len(r) + len(w)
    flags = {}
    for mid in measure_ids:
        if is_baseline(mid):
            flags[mid] = bool(baseline_stat(mid, r, w, alpha).reject)
        else:
            spec = get_spec(mid)
            raw = measure_raw(spec, x, y)
            normalized = raw if spec.phi is None else spec.phi(n) * raw
            flags[mid] = bool(tables[mid].reject(normalized, alpha))
    return flags


def unibench_suite(
    n_series=200,
    change="average",
    base_distribution="normal",
    seed=0,
    sets=MEASURE_SET_NAMES,
    levels=DISAGREEMENT_LEVELS,
    alpha=0.05,
    tables=None,
    step=100,
):
    """Found/match counts per measure set and disagreement level.

    Each generated series hides one window E drawn from the reference
    law; the moving window advances by ``step`` epochs. A positive
    (same) response anywhere counts toward found; a positive response at
    E's exact position counts as a match. The golden match count equals
    the number of series.
    """
    if tables is None:
        from .detectors import default_tables

        tables = default_tables()
    all_ids = tuple(dict.fromkeys(sum((_measure_set(s) for s in sets), ())))
    counts = {
        s: {lv: {"found": 0, "matches": 0} for lv in levels} for s in sets
    }
    for idx in range(n_series):
        plan = UniBenchPlan.random(
            seed=seed * 100003 + idx, base_distribution=base_distribution, change=change
        )
        series, annotation = gen_unibench(plan)
        t = plan.t
        r = series.data[0:t, 0]
        for start in range(t, len(series) - t + 1, step):
            w = series.data[start : start + t, 0]
            flags = _rejections_at_position(r, w, all_ids, tables, alpha)
            aligned = start == annotation.embed_start
            for set_name in sets:
                ids = _measure_set(set_name)
                rejections = sum(flags[m] for m in ids)
                for lv in levels:
                    same = rejections < math.ceil(lv * len(ids))
                    if same:
                        counts[set_name][lv]["found"] += 1
                        if aligned:
                            counts[set_name][lv]["matches"] += 1
    return {
        s: [
            DisagreementStats(
                disagreement=lv,
                found=counts[s][lv]["found"],
                matches=counts[s][lv]["matches"],
                golden=n_series,
            )
            for lv in levels
        ]
        for s in sets
    }
