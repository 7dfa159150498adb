"""Two-sided hypothesis tests of a bin's labels against a hypothesized probability.

The default test is the exact binomial test: the p-value is the total mass of
all outcomes no more probable than the observed count, with a small relative
slack so float-equal masses are treated as ties. All binomial mass arithmetic
happens in log space, which stays stable up to n around 1e5.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats
from scipy.special import gammaln

__all__ = [
    "TestConfig",
    "TestOutcome",
    "binom_pvalue",
    "binom_pvalues_for_counts",
    "binom_pvalues_sweep",
    "t_pvalue",
    "t_pvalues_sweep",
    "reject",
]

# Relative slack when comparing outcome masses against the observed mass.
MASS_SLACK = 1e-7
_LOG_SLACK = math.log1p(MASS_SLACK)

TEST_KINDS = ("binomial", "t")


@dataclass(frozen=True)
class TestConfig:
    """Choice of test and significance level; tests are always two-sided."""

    __test__ = False  # not a pytest class, despite the name

    kind: str = "binomial"
    alpha: float = 0.05

    def __post_init__(self) -> None:
        if self.kind not in TEST_KINDS:
            raise ValueError(f"unknown test kind {self.kind!r}; expected one of {TEST_KINDS}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False

    p_value: float
    rejected: bool


_COEFF_CACHE: dict[int, np.ndarray] = {}


def _log_binom_coeffs(n: int) -> np.ndarray:
    """log C(n, j) for j = 0..n, cached per n."""
    coeffs = _COEFF_CACHE.get(n)
    if coeffs is None:
        j = np.arange(n + 1)
        coeffs = gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
        coeffs.setflags(write=False)
        if len(_COEFF_CACHE) >= 32:
            _COEFF_CACHE.pop(next(iter(_COEFF_CACHE)))
        _COEFF_CACHE[n] = coeffs
    return coeffs


def _validate_nk(n: int, k: int) -> None:
    if n != int(n) or n < 1:
        raise ValueError("n must be a positive integer")
    if k != int(k) or not (0 <= k <= n):
        raise ValueError("k must be an integer in [0, n]")


def binom_pvalues_for_counts(n: int, q: float) -> np.ndarray:
    """Exact two-sided binomial p-values for every count k = 0..n at once.

    For each k the p-value sums the masses of all outcomes j with
    pmf(j) <= pmf(k) * (1 + slack). The pmf is unimodal, so the excluded
    outcomes form a contiguous block around the mode; the two tails are then
    evaluated with the regularized incomplete beta function instead of direct
    summation.
    """
    _validate_nk(n, 0)
    if not (0.0 <= q <= 1.0):
        raise ValueError("q must lie in [0, 1]")
    if q == 0.0:
        out = np.zeros(n + 1)
        out[0] = 1.0
        return out
    if q == 1.0:
        out = np.zeros(n + 1)
        out[n] = 1.0
        return out

    j = np.arange(n + 1)
    logpmf = _log_binom_coeffs(n) + j * math.log(q) + (n - j) * math.log1p(-q)
    mode = min(int(math.floor((n + 1) * q)), n)
    thresh = logpmf + _LOG_SLACK

    # Accumulated maxima make each half exactly monotone toward the mode,
    # which keeps the contiguity argument valid under float rounding.
    rising = np.maximum.accumulate(logpmf[: mode + 1])
    falling_rev = np.maximum.accumulate(logpmf[mode:][::-1])

    # a = first index on [0, mode] with mass above threshold; left tail is [0, a-1].
    a = np.searchsorted(rising, thresh, side="right")
    # s = number of indices counted down from n with mass <= threshold;
    # right tail is [n - s + 1, n].
    s = np.searchsorted(falling_rev, thresh, side="right")

    left = np.where(a > 0, stats.binom.cdf(a - 1, n, q), 0.0)
    right = np.where(s > 0, stats.binom.sf(n - s, n, q), 0.0)
    p = left + right
    p[logpmf[mode] <= thresh] = 1.0
    return np.clip(p, 0.0, 1.0)


def binom_pvalue(n: int, k: int, q: float) -> float:
    """Exact two-sided binomial p-value of H0: P(Y=1) = q given k successes in n trials."""
    _validate_nk(n, k)
    return float(binom_pvalues_for_counts(n, q)[k])


def binom_pvalues_sweep(n: int, k: int, qs: np.ndarray) -> np.ndarray:
    """Two-sided binomial p-values for fixed (n, k) over an array of probabilities.

    Semantics match :func:`binom_pvalue` exactly; the tail cutoffs are located
    by a vectorized binary search on each unimodal half of the pmf, so the cost
    per probability is logarithmic in n.
    """
    _validate_nk(n, k)
    qs = np.asarray(qs, dtype=np.float64)
    if qs.size == 0:
        return np.zeros(0)
    if np.any(qs < 0.0) or np.any(qs > 1.0):
        raise ValueError("q must lie in [0, 1]")

    out = np.empty(qs.shape)
    zero = qs == 0.0
    one = qs == 1.0
    out[zero] = 1.0 if k == 0 else 0.0
    out[one] = 1.0 if k == n else 0.0
    interior = ~(zero | one)
    if not np.any(interior):
        return out

    q = qs[interior]
    coeffs = _log_binom_coeffs(n)
    logq = np.log(q)
    log1mq = np.log1p(-q)

    def logpmf_at(idx: np.ndarray) -> np.ndarray:
        return coeffs[idx] + idx * logq + (n - idx) * log1mq

    thresh = coeffs[k] + k * logq + (n - k) * log1mq + _LOG_SLACK
    mode = np.minimum(np.floor((n + 1) * q).astype(np.int64), n)
    peak = logpmf_at(mode)
    flat = peak <= thresh  # observed count is effectively the mode

    # First index on [0, mode] with mass above threshold (mass rises with j).
    lo = np.zeros(q.shape, dtype=np.int64)
    hi = mode.copy()
    for _ in range(int(n).bit_length() + 1):
        mid = (lo + hi) // 2
        above = logpmf_at(mid) > thresh
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid + 1)
        if np.all(lo >= hi):
            break
    first_above = lo

    # Last index on [mode, n] with mass above threshold (mass falls with j).
    lo = mode.copy()
    hi = np.full(q.shape, n, dtype=np.int64)
    for _ in range(int(n).bit_length() + 1):
        mid = (lo + hi + 1) // 2
        above = logpmf_at(mid) > thresh
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid - 1)
        if np.all(lo >= hi):
            break
    last_above = lo

    left = np.where(first_above > 0, stats.binom.cdf(first_above - 1, n, q), 0.0)
    right = stats.binom.sf(last_above, n, q)
    p = np.where(flat, 1.0, left + right)
    out[interior] = np.clip(p, 0.0, 1.0)
    return out


def t_pvalue(labels: np.ndarray, q: float) -> float:
    """Two-sided one-sample t-test p-value of H0: mean(labels) = q.

    Uses the n-1 sample standard deviation and the Student-t distribution with
    n-1 degrees of freedom. A zero-variance sample gives p = 1 when q equals
    the common value and p = 0 otherwise, matching the limiting t statistic.
    """
    labels = np.asarray(labels, dtype=np.float64)
    if labels.size < 2:
        raise ValueError("t-test requires at least two observations")
    return float(t_pvalues_sweep(labels, np.array([q]))[0])


def t_pvalues_sweep(labels: np.ndarray, qs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`t_pvalue` over an array of hypothesized probabilities."""
    labels = np.asarray(labels, dtype=np.float64)
    qs = np.asarray(qs, dtype=np.float64)
    n = labels.size
    if n < 2:
        raise ValueError("t-test requires at least two observations")
    mean = labels.mean()
    sd = labels.std(ddof=1)
    if sd == 0.0:
        return np.where(qs == mean, 1.0, 0.0)
    t = (mean - qs) / (sd / math.sqrt(n))
    return 2.0 * stats.t.sf(np.abs(t), n - 1)


def reject(labels: np.ndarray, q: float, cfg: TestConfig) -> TestOutcome:
    """Test whether the labels are consistent with probability q at level cfg.alpha."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise ValueError("cannot test an empty label set")
    if cfg.kind == "binomial":
        p = binom_pvalue(int(labels.size), int(labels.sum()), q)
    else:
        p = t_pvalue(labels, q)
    return TestOutcome(p_value=p, rejected=p < cfg.alpha)
