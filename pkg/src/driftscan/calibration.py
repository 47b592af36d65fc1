"""Simulated-null calibration tables for CDF distance measures.

A calibration table turns a normalized measure value into an empirical
p-value (its position in the null CDF). It is obtained by simulating many
pairs of equal-law windows for several window sizes, collecting the null
CDF of the normalized values per window size into a cloud, and summarizing
that cloud into a representative band (pointwise mean curve plus a
pointwise standard-deviation envelope).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ValidationError
from .measures import (
    Ecdf1D,
    calibratable_ids,
    ecdf_from_samples,
    get_spec,
    measure_raw,
    pooled_from_samples,
)

__all__ = [
    "NullCloud",
    "CalibrationTable",
    "CalibrationSet",
    "simulate_null_cloud",
    "simulate_null_clouds",
    "representative_band",
    "band_coverage",
    "build_tables",
    "GENERATORS",
    "DEFAULT_GRID_SIZE",
    "TABLE_VERSION",
]

TABLE_VERSION = 1
DEFAULT_GRID_SIZE = 512


def _generator_standard_normal(rng, n):
    return rng.standard_normal(n)


def _generator_uniform(rng, n):
    return rng.uniform(0.0, 1.0, n)


def _generator_exponential(rng, n):
    return rng.exponential(1.0, n)


GENERATORS = {
    "normal": _generator_standard_normal,
    "uniform": _generator_uniform,
    "exponential": _generator_exponential,
}


@dataclass(frozen=True)
class NullCloud:
    """Per-run null CDFs of one measure under equal-law window pairs.

    ``runs`` maps (window size, repetition index) to the Ecdf1D of the M
    normalized values simulated for that run.
    """

    measure: str
    runs: dict
    m: int
    seed: int
    generator: str

    def __post_init__(self):
        if not self.runs:
            raise ArgumentError("cloud must contain at least one run")
        for key, cdf in self.runs.items():
            if not isinstance(cdf, Ecdf1D):
                raise ArgumentError(f"run {key!r} is not an Ecdf1D")

    def window_sizes(self):
        return tuple(sorted({n for n, _ in self.runs}))

    def members(self):
        return [self.runs[k] for k in sorted(self.runs)]


@dataclass(frozen=True)
class CalibrationTable:
    """Representative null band for one measure.

    grid_x is increasing; grid_cum is the mean member CDF evaluated there
    and grid_sigma the pointwise standard deviation across members.
    """

    measure: str
    grid_x: np.ndarray
    grid_cum: np.ndarray
    grid_sigma: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.grid_x, dtype=np.float64)
        c = np.asarray(self.grid_cum, dtype=np.float64)
        s = np.asarray(self.grid_sigma, dtype=np.float64)
        if not (len(x) == len(c) == len(s)) or len(x) < 2:
            raise ValidationError("grid arrays must align and have length >= 2")
        if np.any(np.diff(x) <= 0):
            raise ValidationError("grid_x must strictly increase")
        if np.any(np.diff(c) < -1e-12):
            raise ValidationError("grid_cum must be non-decreasing")
        if np.any(s < 0):
            raise ValidationError("grid_sigma must be non-negative")
        object.__setattr__(self, "grid_x", x)
        object.__setattr__(self, "grid_cum", c)
        object.__setattr__(self, "grid_sigma", s)

    def p_value(self, value: float) -> float:
        """Null-CDF position of a normalized value; 0 below grid, 1 above."""
        if value < self.grid_x[0]:
            return 0.0
        if value > self.grid_x[-1]:
            return 1.0
        return float(np.interp(value, self.grid_x, self.grid_cum))

    def reject(self, value: float, alpha: float = 0.05) -> bool:
        return self.p_value(value) > 1.0 - alpha

    def to_dict(self) -> dict:
        return {
            "version": TABLE_VERSION,
            "measure": self.measure,
            "grid": [
                {"x": float(x), "cum": float(c), "sigma": float(s)}
                for x, c, s in zip(self.grid_x, self.grid_cum, self.grid_sigma)
            ],
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "CalibrationTable":
        if obj.get("version") != TABLE_VERSION:
            raise ValidationError(f"unsupported table version {obj.get('version')!r}")
        grid = obj.get("grid") or []
        return cls(
            measure=obj["measure"],
            grid_x=np.array([g["x"] for g in grid]),
            grid_cum=np.array([g["cum"] for g in grid]),
            grid_sigma=np.array([g["sigma"] for g in grid]),
            provenance=obj.get("provenance", {}),
        )


@dataclass
class CalibrationSet:
    """A bundle of calibration tables keyed by measure id."""

    tables: dict

    def __getitem__(self, measure_id: str) -> CalibrationTable:
        try:
            return self.tables[measure_id]
        except KeyError:
            raise ArgumentError(f"no calibration table for {measure_id!r}") from None

    def __contains__(self, measure_id):
        return measure_id in self.tables

    def ids(self):
        return tuple(sorted(self.tables))

    def save(self, path):
        payload = {"version": TABLE_VERSION, "tables": [t.to_dict() for t in self.tables.values()]}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)

    @classmethod
    def load(cls, path) -> "CalibrationSet":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        tables = {}
        for obj in payload.get("tables", []):
            table = CalibrationTable.from_dict(obj)
            tables[table.measure] = table
        if not tables:
            raise ValidationError("calibration file contains no tables")
        return cls(tables=tables)


def _null_value_matrix(specs, n, m, seed, generator):
    """(len(specs), m) matrix of normalized measure values under the null.

    Each repetition uses an independent seed sequence [seed, n, rep] so runs
    are reproducible and extendable one repetition at a time.
    """
    gen = GENERATORS.get(generator)
    if gen is None:
        raise ArgumentError(f"unknown generator {generator!r}")
    out = np.empty((len(specs), m))
    pooled_n = 2 * n
    for rep in range(m):
        rng = np.random.default_rng([seed, n, rep])
        x, y = pooled_from_samples(gen(rng, n), gen(rng, n))
        for k, s in enumerate(specs):
            raw = measure_raw(s, x, y)
            out[k, rep] = raw if s.phi is None else s.phi(pooled_n) * raw
    return out


def simulate_null_cloud(spec, window_sizes, m, generator="normal", seed=0) -> NullCloud:
    """Monte-Carlo null cloud for one measure: one member CDF per window size."""
    clouds = simulate_null_clouds([spec], window_sizes, m, generator=generator, seed=seed)
    return next(iter(clouds.values()))


def simulate_null_clouds(measure_specs, window_sizes, m, generator="normal", seed=0):
    """Simulate null clouds for several measures off one shared sample stream.

    Returns {measure_id: NullCloud}. Sharing the simulated window pairs
    across measures keeps large calibration builds fast.
    """
    specs = [get_spec(s) if isinstance(s, str) else s for s in measure_specs]
    for s in specs:
        if not s.calibratable:
            raise ArgumentError(f"measure {s.id!r} is not calibratable")
    if m < 100:
        raise ArgumentError("need at least 100 pairs per run")
    window_sizes = tuple(int(n) for n in window_sizes)
    if not window_sizes or any(n < 10 for n in window_sizes):
        raise ArgumentError("each window size must be at least 10")
    runs = {s.id: {} for s in specs}
    for n in window_sizes:
        matrix = _null_value_matrix(specs, n, m, seed, generator)
        for k, s in enumerate(specs):
            runs[s.id][(n, 0)] = ecdf_from_samples(matrix[k])
    return {
        s.id: NullCloud(measure=s.id, runs=runs[s.id], m=m, seed=seed, generator=generator)
        for s in specs
    }


def _member_cdfs_on_grid(members, grid):
    """Each row: one member null CDF evaluated on the grid."""
    cdfs = np.empty((len(members), len(grid)))
    for i, member in enumerate(members):
        cdfs[i] = member.evaluate(grid)
    return cdfs


def _quantile_grid(members, grid_size):
    pooled = np.concatenate([m.support for m in members])
    qs = np.linspace(0.0, 1.0, grid_size)
    return np.unique(np.quantile(pooled, qs))


def representative_band(cloud: NullCloud, grid_size=DEFAULT_GRID_SIZE) -> CalibrationTable:
    """Summarize a cloud into its mean curve and sigma envelope."""
    members = cloud.members()
    if len(members) < 2:
        raise ArgumentError("cloud must contain at least two runs")
    grid = _quantile_grid(members, grid_size)
    cdfs = _member_cdfs_on_grid(members, grid)
    cum = np.maximum.accumulate(cdfs.mean(axis=0))
    sigma = cdfs.std(axis=0)
    provenance = {
        "Ns": [int(n) for n in cloud.window_sizes()],
        "M": int(cloud.m),
        "seed": int(cloud.seed),
        "generator": cloud.generator,
    }
    return CalibrationTable(
        measure=cloud.measure, grid_x=grid, grid_cum=cum, grid_sigma=sigma,
        provenance=provenance,
    )


#: membership in the band is judged at this cumulative-probability
#: resolution; excursions smaller than this are not visible at the scale
#: the band summarizes (small-window members carry systematic
#: finite-sample deviations of comparable size).
BAND_RESOLUTION = 0.02


def band_coverage(cloud: NullCloud, table: CalibrationTable, tol: float = BAND_RESOLUTION) -> float:
    """Fraction of member CDFs lying inside mean +/- 2 sigma everywhere.

    A member counts as inside when it never exits the envelope by more
    than ``tol`` cumulative probability.
    """
    if cloud.measure != table.measure:
        raise ArgumentError("cloud and table describe different measures")
    cdfs = _member_cdfs_on_grid(cloud.members(), table.grid_x)
    lo = table.grid_cum - 2.0 * table.grid_sigma
    hi = table.grid_cum + 2.0 * table.grid_sigma
    inside = np.all((cdfs >= lo - tol - 1e-12) & (cdfs <= hi + tol + 1e-12), axis=1)
    return float(np.mean(inside))


def build_tables(
    measure_ids=None,
    window_sizes=(100, 250, 500, 1000, 2000),
    m=2000,
    seed=0,
    generator="normal",
    grid_size=DEFAULT_GRID_SIZE,
) -> CalibrationSet:
    """Build one calibration table per measure from simulated null clouds."""
    if measure_ids is None:
        measure_ids = calibratable_ids()
    clouds = simulate_null_clouds(measure_ids, window_sizes, m, generator=generator, seed=seed)
    return CalibrationSet(
        tables={mid: representative_band(cloud, grid_size) for mid, cloud in clouds.items()}
    )
