"""Synthetic series generators and classified-data series construction.

All generators read distribution notation (mu, sigma) as mean and
standard deviation, are deterministic given their seed, and return the
block layout alongside the series so detectors can be scored against
known change points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .series import Series

__all__ = [
    "SyntheticPlan",
    "UniBenchPlan",
    "BlockAnnotation",
    "UniBenchAnnotation",
    "gen_average_series",
    "gen_variance_series",
    "gen_mixture_series",
    "gen_synthetic",
    "classified_to_series",
    "gen_unibench",
]

DEFAULT_BLOCKS = 21
DEFAULT_BLOCK_LEN = 250
MIXTURE_LOW = -2.4
MIXTURE_HIGH = 2.4
AVERAGE_LO = 0.05
AVERAGE_HI = 50.0
SIGMA_LO = 10.0**0.01
SIGMA_HI = 10.0


@dataclass(frozen=True)
class SyntheticPlan:
    kind: str
    blocks: int = DEFAULT_BLOCKS
    block_len: int = DEFAULT_BLOCK_LEN
    d: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("average", "variance", "mixture"):
            raise ArgumentError(f"unknown synthetic kind {self.kind!r}")
        if self.blocks < 3:
            raise ArgumentError("need at least 3 blocks")
        if self.block_len < 2 or self.d < 1:
            raise ArgumentError("block_len must be >= 2 and d >= 1")


@dataclass(frozen=True)
class BlockAnnotation:
    """Per-block ground truth: [start, stop) epochs and parameters."""

    start: int
    stop: int
    params: dict


def _block_schedule(plan: SyntheticPlan):
    """Per-block parameter list; the first two blocks always match."""
    varying = plan.blocks - 2
    if plan.kind == "average":
        means = np.concatenate([[0.0, 0.0], np.geomspace(AVERAGE_LO, AVERAGE_HI, varying)])
        return [{"mean": float(m), "sigma": 1.0} for m in means]
    if plan.kind == "variance":
        sigmas = np.concatenate([[1.0, 1.0], np.geomspace(SIGMA_LO, SIGMA_HI, varying)])
        return [{"mean": 0.0, "sigma": float(s)} for s in sigmas]
    fractions = np.concatenate([[0.0, 0.0], np.arange(1, varying + 1) / varying])
    return [{"uniform_fraction": float(f)} for f in fractions]


def _gen_block(rng, params, block_len, d, kind):
    if kind == "mixture":
        frac = params["uniform_fraction"]
        n_uniform = int(round(frac * block_len))
        block = rng.standard_normal((block_len, d))
        uni = rng.uniform(MIXTURE_LOW, MIXTURE_HIGH, (n_uniform, d))
        pos = rng.choice(block_len, size=n_uniform, replace=False)
        block[pos] = uni
        return block
    return params["mean"] + params["sigma"] * rng.standard_normal((block_len, d))


def gen_synthetic(plan: SyntheticPlan):
    """Series of consecutive blocks per the plan's schedule.

    Returns (series, annotations). Each block gets an independent child
    seed sequence [seed, block index] so layouts are reproducible and
    per-block streams are dimension-stable.
    """
    schedule = _block_schedule(plan)
    blocks = []
    annotations = []
    for k, params in enumerate(schedule):
        rng = np.random.default_rng([plan.seed, k])
        blocks.append(_gen_block(rng, params, plan.block_len, plan.d, plan.kind))
        start = k * plan.block_len
        annotations.append(BlockAnnotation(start=start, stop=start + plan.block_len, params=params))
    data = np.vstack(blocks)
    return Series.from_values(data), annotations


def gen_average_series(plan: SyntheticPlan):
    """Mean shift suite: blocks 1-2 standard normal, then log-spaced means."""
    if plan.kind != "average":
        raise ArgumentError("plan kind must be 'average'")
    return gen_synthetic(plan)


def gen_variance_series(plan: SyntheticPlan):
    """Spread shift suite: zero mean, log-spaced standard deviations."""
    if plan.kind != "variance":
        raise ArgumentError("plan kind must be 'variance'")
    return gen_synthetic(plan)


def gen_mixture_series(plan: SyntheticPlan):
    """Shape shift suite: normal blocks absorbing a growing uniform share."""
    if plan.kind != "mixture":
        raise ArgumentError("plan kind must be 'mixture'")
    return gen_synthetic(plan)


def classified_to_series(rows, labels, seed=0):
    """Turn a labeled dataset into a series of class-pure segments.

    Groups rows by label, shuffles within each group, and concatenates
    groups largest-first. Returns (series, boundary epochs) where each
    boundary marks the start of a new class segment.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    labels = np.asarray(labels)
    if len(labels) != len(rows):
        raise ArgumentError("labels must align with rows")
    unique = list(dict.fromkeys(labels.tolist()))
    if len(unique) < 2:
        raise ArgumentError("need at least 2 classes")
    rng = np.random.default_rng(seed)
    groups = []
    for label in unique:
        idx = np.flatnonzero(labels == label)
        rng.shuffle(idx)
        groups.append(rows[idx])
    groups.sort(key=len, reverse=True)
    boundaries = list(np.cumsum([len(g) for g in groups[:-1]]).tolist())
    return Series.from_values(np.vstack(groups)), boundaries


@dataclass(frozen=True)
class UniBenchPlan:
    m_windows: int
    t: int
    embed_position: int
    base_distribution: str = "normal"
    change: str = "average"
    seed: int = 0

    def __post_init__(self):
        if not 2 <= self.m_windows <= 20:
            raise ArgumentError("m_windows must be in [2, 20]")
        if not 100 <= self.t <= 1000:
            raise ArgumentError("t must be in [100, 1000]")
        if not 2 <= self.embed_position <= self.m_windows:
            raise ArgumentError("embed_position must be in [2, m_windows]")
        if self.base_distribution not in ("normal", "uniform"):
            raise ArgumentError(f"unknown base distribution {self.base_distribution!r}")
        if self.change not in ("average", "variance", "both"):
            raise ArgumentError(f"unknown change kind {self.change!r}")

    @classmethod
    def random(cls, seed, base_distribution="normal", change="average"):
        """Draw layout parameters the way the benchmark protocol does."""
        rng = np.random.default_rng([seed, 0])
        m_windows = int(rng.integers(2, 21))
        t = int(rng.integers(1, 11)) * 100
        embed = int(rng.integers(2, m_windows + 1))
        return cls(
            m_windows=m_windows,
            t=t,
            embed_position=embed,
            base_distribution=base_distribution,
            change=change,
            seed=seed,
        )


@dataclass(frozen=True)
class UniBenchAnnotation:
    plan: UniBenchPlan
    window_params: tuple  # (mean, sigma) per window
    embed_start: int
    embed_stop: int


def _unibench_window(rng, dist, mean, sigma, t):
    if dist == "normal":
        return mean + sigma * rng.standard_normal((t, 1))
    return rng.uniform(mean - sigma, mean + sigma, (t, 1))


def gen_unibench(plan: UniBenchPlan):
    """One benchmark series: reference window, drifting windows, one echo.

    Window 1 carries the base parameters (m_0, |v_0| drawn from N(0, 10)
    magnitudes); window i != embed gets m_i = m_0 + r m_0 / i and
    v_i = v_0 + r v_0 / i with r = +-1 equiprobable per window and per
    changed parameter; the embed window repeats window 1's parameters
    exactly.
    """
    rng = np.random.default_rng([plan.seed, 1])
    m0 = float(abs(rng.normal(0.0, 10.0)))
    v0 = float(abs(rng.normal(0.0, 10.0)))
    if v0 == 0.0:
        v0 = 1.0
    params = []
    for i in range(1, plan.m_windows + 1):
        if i == 1 or i == plan.embed_position:
            params.append((m0, v0))
            continue
        mean, sigma = m0, v0
        if plan.change == "average":
            mean = m0 + float(rng.choice([-1.0, 1.0])) * m0 / i
        elif plan.change == "variance":
            sigma = max(v0 + float(rng.choice([-1.0, 1.0])) * v0 / i, 1e-6)
        else:
            # both: fresh parameters per window
            mean = float(rng.normal(0.0, 10.0))
            sigma = max(float(abs(rng.normal(0.0, 10.0))), 1e-6)
        params.append((mean, sigma))
    blocks = [
        _unibench_window(
            np.random.default_rng([plan.seed, 2, i]),
            plan.base_distribution,
            mean,
            sigma,
            plan.t,
        )
        for i, (mean, sigma) in enumerate(params, start=1)
    ]
    series = Series.from_values(np.vstack(blocks))
    embed_start = (plan.embed_position - 1) * plan.t
    annotation = UniBenchAnnotation(
        plan=plan,
        window_params=tuple(params),
        embed_start=embed_start,
        embed_stop=embed_start + plan.t,
    )
    return series, annotation
