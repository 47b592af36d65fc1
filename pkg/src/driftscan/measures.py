"""Empirical-CDF distance measures over one-dimensional samples.

Every measure follows the same four-step template: compare the two CDF
vectors componentwise (psi), aggregate with a vector p-norm (with the
0-"norm" defined as the plain sum of components), scale (gamma), and
normalize by a function of the sample count (phi) so the value becomes
window-size independent for large windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, EvaluationError

__all__ = [
    "Ecdf1D",
    "MeasureSpec",
    "MeasureOutcome",
    "ecdf_from_samples",
    "pooled_eval",
    "pooled_from_samples",
    "measure_eval",
    "measure_raw",
    "baseline_stat",
    "get_spec",
    "all_measure_ids",
    "calibratable_ids",
    "DEFAULT_QUORUM_MEASURES",
    "STANDARD_SET",
    "EXTENSION_SET",
]


@dataclass(frozen=True)
class Ecdf1D:
    """Step function F(x) = fraction of samples <= x.

    support is strictly increasing; cum is non-decreasing and ends at 1.
    """

    support: np.ndarray
    cum: np.ndarray
    n: int

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.float64)
        cum = np.asarray(self.cum, dtype=np.float64)
        if len(support) != len(cum) or len(support) == 0:
            raise ArgumentError("support and cum must be equal-length and non-empty")
        if np.any(np.diff(support) <= 0):
            raise ArgumentError("support must strictly increase")
        if np.any(np.diff(cum) < 0) or not math.isclose(cum[-1], 1.0, abs_tol=1e-12):
            raise ArgumentError("cum must be non-decreasing and end at 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "cum", cum)

    def evaluate(self, x):
        """F evaluated at points x: cum at the largest support point <= x."""
        x = np.asarray(x, dtype=np.float64)
        idx = np.searchsorted(self.support, x, side="right")
        out = np.where(idx > 0, self.cum[np.maximum(idx - 1, 0)], 0.0)
        return out


def ecdf_from_samples(samples) -> Ecdf1D:
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size == 0:
        raise ArgumentError("need at least one sample")
    if not np.all(np.isfinite(samples)):
        raise ArgumentError("samples must be finite")
    support, counts = np.unique(samples, return_counts=True)
    cum = np.cumsum(counts) / samples.size
    return Ecdf1D(support=support, cum=cum, n=samples.size)


def pooled_eval(f_r: Ecdf1D, f_w: Ecdf1D):
    """Evaluate both ECDFs on the union of their supports.

    Returns (x, y): f_r and f_w over the merged support, equal length.
    """
    support = np.union1d(f_r.support, f_w.support)
    return f_r.evaluate(support), f_w.evaluate(support)


def pooled_from_samples(r_samples, w_samples):
    """Fast path: pooled CDF vectors straight from raw samples.

    Equivalent to pooled_eval(ecdf_from_samples(r), ecdf_from_samples(w)).
    """
    r = np.sort(np.asarray(r_samples, dtype=np.float64).ravel())
    w = np.sort(np.asarray(w_samples, dtype=np.float64).ravel())
    if r.size == 0 or w.size == 0:
        raise ArgumentError("both samples must be non-empty")
    support = np.union1d(r, w)
    x = np.searchsorted(r, support, side="right") / r.size
    y = np.searchsorted(w, support, side="right") / w.size
    return x, y


# --- componentwise comparators ------------------------------------------------
#
# Each psi returns the vector of term contributions over the pooled support,
# dropping terms whose denominator vanishes (undefined terms contribute
# nothing). log terms use base 2.

_LOG2 = math.log(2.0)


def _psi_diff(x, y):
    return x - y


def _psi_absdiff(x, y):
    return np.abs(x - y)


def _psi_chi2(x, y):
    mask = x > 0
    d = x[mask] - y[mask]
    return d * d / x[mask]


def _psi_hellinger(x, y):
    s = np.sqrt(x) - np.sqrt(y)
    return 0.5 * s * s


def _psi_kli(x, y):
    mask = (x > 0) & (y > 0)
    return x[mask] * np.log2(x[mask] / y[mask])


def _psi_klj(x, y):
    mask = (x > 0) & (y > 0)
    d = x[mask] - y[mask]
    return d * np.log2(x[mask] / y[mask])


def _xlog2x_over(a, b):
    """a * log2(a / b) with the 0 = 0*log2(0/0) convention."""
    out = np.zeros_like(a)
    mask = a > 0
    out[mask] = a[mask] * np.log2(a[mask] / b[mask])
    return out


def _psi_jink(x, y):
    m = 0.5 * (x + y)
    return _xlog2x_over(x, m)


def _psi_jinl(x, y):
    m = 0.5 * (x + y)
    return _xlog2x_over(x, m) + _xlog2x_over(y, m)


def _psi_js(x, y):
    return 0.5 * _psi_jinl(x, y)


def _psi_camberra(x, y):
    s = x + y
    mask = s > 0
    return np.abs(x[mask] - y[mask]) / s[mask]


def _psi_phi(x, y):
    m = 0.5 * (x + y)
    den = np.minimum(m, 1.0 - m)
    mask = den > 0
    return np.abs(x[mask] - y[mask]) / np.sqrt(den[mask])


def _psi_xi(x, y):
    m = 0.5 * (x + y)
    den = m * (1.0 - m)
    mask = den > 0
    return np.abs(x[mask] - y[mask]) / np.sqrt(den[mask])


def _psi_sqdiff(x, y):
    d = x - y
    return d * d


def _psi_bhattacharyya(x, y):
    return np.sqrt(x * y)


def _make_psi_chernoff(power):
    def psi(x, y):
        mask = (x > 0) & (y > 0)
        return x[mask] ** power * y[mask] ** (1.0 - power)

    return psi


# --- norm / scaling -----------------------------------------------------------


def _pnorm(terms, p):
    if terms.size == 0:
        return 0.0
    if p == 0:
        return float(np.sum(terms))
    if p == math.inf:
        return float(np.max(np.abs(terms)))
    if p == 1:
        return float(np.sum(np.abs(terms)))
    return float(np.sum(np.abs(terms) ** p) ** (1.0 / p))


@dataclass(frozen=True)
class MeasureSpec:
    """One row of the unified-measure table."""

    id: str
    name: str
    p: float
    phi: object  # callable N -> float, or None when the measure has no normalizer
    gamma: object  # callable raw -> raw
    psi: object
    symmetric: bool
    calibratable: bool
    params: dict = field(default_factory=dict)
    zero_on_equal: bool = True


_IDENT = lambda v: v  # noqa: E731

_R_DEFAULT = 2.0
_S_DEFAULT = 2.0
_MINKOWSKY_R = 3.0


def _registry():
    sqrt = math.sqrt
    log2 = math.log2
    specs = [
        MeasureSpec("ks", "KolmogorovSmirnov", math.inf, sqrt, _IDENT, _psi_diff, True, True),
        MeasureSpec(
            "phi", "Phi", math.inf, lambda n: sqrt(n) / log2(n), _IDENT, _psi_phi, True, True
        ),
        MeasureSpec(
            "xi", "Xi", math.inf, lambda n: sqrt(n) / log2(n), _IDENT, _psi_xi, True, True
        ),
        MeasureSpec(
            "variational", "Variational", 1, lambda n: 1.0 / sqrt(n), _IDENT, _psi_absdiff,
            True, True,
        ),
        MeasureSpec("euclid", "Euclid", 2, lambda n: 1.0, _IDENT, _psi_diff, True, True),
        MeasureSpec(
            "cvm", "CramerVonMises", 2, lambda n: 1.0, lambda v: v * v, _psi_diff, True, True
        ),
        MeasureSpec(
            "minkowsky", "Minkowsky", _MINKOWSKY_R, log2, _IDENT, _psi_diff, True, True,
            params={"r": _MINKOWSKY_R},
        ),
        MeasureSpec("hellinger", "Hellinger", 0, lambda n: 1.0, _IDENT, _psi_hellinger, True, True),
        MeasureSpec("chi2", "ChiSquare", 0, lambda n: 1.0, _IDENT, _psi_chi2, False, True),
        MeasureSpec(
            "kli", "KLI", 0, lambda n: 1.0 / sqrt(n), _IDENT, _psi_kli, False, False
        ),
        MeasureSpec("klj", "KLJ", 0, lambda n: 1.0, _IDENT, _psi_klj, True, True),
        MeasureSpec(
            "jink", "JinK", 0, lambda n: 1.0 / sqrt(n), _IDENT, _psi_jink, False, False
        ),
        MeasureSpec("jinl", "JinL", 0, lambda n: 1.0, _IDENT, _psi_jinl, True, True),
        MeasureSpec("js", "JensenShannon", 0, lambda n: 1.0, _IDENT, _psi_js, True, True),
        MeasureSpec(
            "camberra", "Camberra", 0, lambda n: 1.0 / sqrt(n), _IDENT, _psi_camberra, True, True
        ),
        MeasureSpec(
            "bhattacharyya", "Bhattacharyya", 0, None, _IDENT, _psi_bhattacharyya, True, False,
            zero_on_equal=False,
        ),
        MeasureSpec(
            "kr", "Kr", 0, None, lambda v: math.log2(v) / (_R_DEFAULT - 1.0),
            _make_psi_chernoff(_R_DEFAULT), False, False, params={"r": _R_DEFAULT},
            zero_on_equal=False,
        ),
        MeasureSpec(
            "ks_gen", "Ks", 0, None, lambda v: (v - 1.0) / (_S_DEFAULT - 1.0),
            _make_psi_chernoff(_S_DEFAULT), False, False, params={"s": _S_DEFAULT},
            zero_on_equal=False,
        ),
        MeasureSpec(
            "ks2_gen", "Ks2", 0, None,
            lambda v: (v - 1.0) / (_S_DEFAULT * (_S_DEFAULT - 1.0)),
            _make_psi_chernoff(_S_DEFAULT), False, False, params={"s": _S_DEFAULT},
            zero_on_equal=False,
        ),
    ]
    return {s.id: s for s in specs}


_SPECS = _registry()

_BASELINE_IDS = ("wilcox", "ttest")

#: the ten-measure quorum used by the ordered (poset/MST) detectors
DEFAULT_QUORUM_MEASURES = (
    "phi", "xi", "ks", "klj", "js", "chi2", "hellinger", "cvm", "euclid", "camberra",
)

#: single-dimension benchmark sets
STANDARD_SET = ("wilcox", "ttest", "ks", "phi", "xi")
EXTENSION_SET = (
    "klj", "jinl", "js", "chi2", "hellinger", "variational", "cvm", "minkowsky", "euclid",
)


def get_spec(measure_id: str) -> MeasureSpec:
    try:
        return _SPECS[measure_id]
    except KeyError:
        raise ArgumentError(f"unknown measure id {measure_id!r}") from None


def all_measure_ids():
    return tuple(_SPECS) + _BASELINE_IDS


def calibratable_ids():
    return tuple(s.id for s in _SPECS.values() if s.calibratable)


def is_baseline(measure_id: str) -> bool:
    return measure_id in _BASELINE_IDS


@dataclass
class MeasureOutcome:
    id: str
    raw: float
    normalized: float
    p_value: float | None = None
    reject: bool | None = None

    def with_significance(self, p_value, alpha):
        """Attach a p-value on the CDF-position convention.

        p_value is the probability mass of null values at or below the
        observed one, so large values are extreme and the test rejects when
        p_value > 1 - alpha.
        """
        return MeasureOutcome(
            id=self.id,
            raw=self.raw,
            normalized=self.normalized,
            p_value=float(p_value),
            reject=bool(p_value > 1.0 - alpha),
        )


def measure_raw(spec: MeasureSpec, x, y) -> float:
    """gamma(||psi(x, y)||_p) over two aligned CDF (or PDF) vectors."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    terms = spec.psi(x, y)
    if terms.size == 0:
        raise EvaluationError("all terms undefined", measure=spec.id)
    try:
        return float(spec.gamma(_pnorm(terms, spec.p)))
    except ValueError as exc:
        raise EvaluationError(str(exc), measure=spec.id) from exc


def measure_eval(spec: MeasureSpec, f_r: Ecdf1D, f_w: Ecdf1D, n: int | None = None) -> MeasureOutcome:
    """Evaluate a measure between two ECDFs.

    ``n`` is the pooled sample count used by the normalizer; by default the
    underlying sample counts of the two ECDFs are summed.
    """
    if isinstance(spec, str):
        spec = get_spec(spec)
    if n is None:
        n = f_r.n + f_w.n
    if n < 2:
        raise ArgumentError("need a pooled sample count of at least 2")
    x, y = pooled_eval(f_r, f_w)
    raw = measure_raw(spec, x, y)
    normalized = raw if spec.phi is None else float(spec.phi(n)) * raw
    return MeasureOutcome(id=spec.id, raw=raw, normalized=normalized)


# --- rank / t baselines -------------------------------------------------------


def _norm_cdf(z):
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _two_sided_normal_p(z):
    return math.erfc(abs(z) / math.sqrt(2.0))


def wilcox_ranksum(r_samples, w_samples):
    """Two-sample rank-sum statistic (mid-ranks for ties) and its z-score."""
    r = np.asarray(r_samples, dtype=np.float64).ravel()
    w = np.asarray(w_samples, dtype=np.float64).ravel()
    n1, n2 = r.size, w.size
    pooled = np.concatenate([r, w])
    order = np.argsort(pooled, kind="mergesort")
    ranks = np.empty(pooled.size, dtype=np.float64)
    ranks[order] = np.arange(1, pooled.size + 1)
    # mid-ranks for ties
    sorted_vals = pooled[order]
    i = 0
    while i < len(sorted_vals):
        j = i
        while j + 1 < len(sorted_vals) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        if j > i:
            ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    w_stat = float(np.sum(ranks[:n1]))
    mean = n1 * (n1 + n2 + 1) / 2.0
    # tie-corrected variance of the rank sum
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = np.sum(counts**3 - counts)
    n = n1 + n2
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1.0)))
    z = 0.0 if var <= 0 else (w_stat - mean) / math.sqrt(var)
    return w_stat, z


def welch_t(r_samples, w_samples):
    r = np.asarray(r_samples, dtype=np.float64).ravel()
    w = np.asarray(w_samples, dtype=np.float64).ravel()
    v1 = np.var(r, ddof=1)
    v2 = np.var(w, ddof=1)
    if v1 <= 0 and v2 <= 0:
        raise EvaluationError("zero variance in both samples", measure="ttest")
    se = math.sqrt(v1 / r.size + v2 / w.size)
    return float((np.mean(r) - np.mean(w)) / se)


def baseline_stat(kind: str, r_samples, w_samples, alpha: float = 0.05) -> MeasureOutcome:
    """Rank-sum or Welch-t comparison with a normal-approximation p-value.

    The stored p_value follows the library-wide CDF-position convention
    (1 minus the classic two-sided p), so the quorum rule reject-when-
    p > 1-alpha applies uniformly.
    """
    r = np.asarray(r_samples, dtype=np.float64).ravel()
    w = np.asarray(w_samples, dtype=np.float64).ravel()
    if r.size < 2 or w.size < 2:
        raise ArgumentError("need at least 2 samples per window")
    if kind == "wilcox":
        stat, z = wilcox_ranksum(r, w)
    elif kind == "ttest":
        stat = z = welch_t(r, w)
    else:
        raise ArgumentError(f"unknown baseline kind {kind!r}")
    classic_p = _two_sided_normal_p(z)
    outcome = MeasureOutcome(id=kind, raw=float(stat), normalized=float(z))
    return outcome.with_significance(1.0 - classic_p, alpha)


def baseline_two_sided_p(kind: str, r_samples, w_samples) -> float:
    """Classic two-sided p-value (large when the samples look alike)."""
    if kind == "wilcox":
        _, z = wilcox_ranksum(r_samples, w_samples)
    elif kind == "ttest":
        z = welch_t(r_samples, w_samples)
    else:
        raise ArgumentError(f"unknown baseline kind {kind!r}")
    return _two_sided_normal_p(z)
