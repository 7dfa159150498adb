"""Bin construction: equispaced, quantile, and data-driven bins from isotonic fits.

The data-driven strategies fit a monotone step function to the label sequence
(sorted by prediction) and place a bin boundary wherever the fitted value
changes. The block-constrained variant bounds how many records each step may
cover, trading a little monotonicity for better-sized bins.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BinSet, Dataset, partition, sorted_view

__all__ = [
    "BinStrategy",
    "IsotonicFit",
    "equispaced_bins",
    "quantile_bins",
    "pava",
    "pava_bc",
    "bins_from_fit",
    "total_error",
    "within_bin_error_avg",
    "brute_force_optimal",
    "monotonicity_report",
    "build_bins",
]

STRATEGY_KINDS = ("equispaced", "quantile", "pava", "pava_bc")


@dataclass(frozen=True)
class IsotonicFit:
    """Piecewise-constant fit to a binary sequence, with its block structure.

    ``blocks`` holds (start index, length, mean) triples; ``block_label_sums``
    keeps the integer label sum per block so order comparisons between block
    means can be done exactly.
    """

    fitted: np.ndarray
    block_starts: np.ndarray
    block_lengths: np.ndarray
    block_label_sums: np.ndarray

    @property
    def block_means(self) -> np.ndarray:
        return self.block_label_sums / self.block_lengths

    @property
    def blocks(self) -> tuple[tuple[int, int, float], ...]:
        means = self.block_means
        return tuple(
            (int(s), int(w), float(m))
            for s, w, m in zip(self.block_starts, self.block_lengths, means)
        )


def _as_binary(labels_sorted) -> np.ndarray:
    y = np.asarray(labels_sorted)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("label sequence must be one-dimensional and non-empty")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    return y.astype(np.int64)


def _make_fit(sums: list[int], lengths: list[int]) -> IsotonicFit:
    lengths_arr = np.asarray(lengths, dtype=np.int64)
    sums_arr = np.asarray(sums, dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(lengths_arr)[:-1]))
    fitted = np.repeat(sums_arr / lengths_arr, lengths_arr)
    return IsotonicFit(
        fitted=fitted,
        block_starts=starts,
        block_lengths=lengths_arr,
        block_label_sums=sums_arr,
    )


def pava(labels_sorted) -> IsotonicFit:
    """Least-squares monotone non-decreasing fit by pooling adjacent violators.

    Adjacent blocks merge while the earlier mean is >= the later one; block
    mean comparisons use integer cross-multiplication, so there is no float
    tie ambiguity. The result has strictly increasing block means.
    """
    y = _as_binary(labels_sorted)
    sums: list[int] = []
    lengths: list[int] = []
    for v in y.tolist():
        sums.append(v)
        lengths.append(1)
        while len(sums) > 1 and sums[-2] * lengths[-1] >= sums[-1] * lengths[-2]:
            s, w = sums.pop(), lengths.pop()
            sums[-1] += s
            lengths[-1] += w
    return _make_fit(sums, lengths)


def pava_bc(labels_sorted, n_min: int, n_max: int) -> IsotonicFit:
    """Pooling with block-size constraints: no block exceeds n_max and the
    final block keeps at least min(n_min, N) records.

    The sweep covers the first N - n_min points: adjacent blocks merge
    unconditionally while the combined size is <= n_min; above n_min a merge
    happens only if the combined size stays <= n_max and the earlier block
    mean is still >= the later one. The reserved last n_min points then join
    the final block when that keeps it within n_max, and otherwise form their
    own block. Interior blocks may end up below n_min and block means may
    mildly violate monotonicity; both are inherent to the constrained sweep
    and surfaced by :func:`monotonicity_report` rather than treated as errors.
    """
    y = _as_binary(labels_sorted)
    n = y.size
    n_min, n_max = int(n_min), int(n_max)
    if not (0 <= n_min <= n_max <= n):
        raise ValueError(f"need 0 <= n_min <= n_max <= {n}, got ({n_min}, {n_max})")

    sums: list[int] = []
    lengths: list[int] = []
    for v in y[: n - n_min].tolist():
        sums.append(v)
        lengths.append(1)
        while len(sums) > 1:
            combined = lengths[-2] + lengths[-1]
            if combined > n_min:
                if combined > n_max:
                    break
                if sums[-2] * lengths[-1] < sums[-1] * lengths[-2]:
                    break
            s, w = sums.pop(), lengths.pop()
            sums[-1] += s
            lengths[-1] += w

    tail_sum = int(y[n - n_min :].sum())
    if sums and lengths[-1] + n_min <= n_max:
        sums[-1] += tail_sum
        lengths[-1] += n_min
    elif n_min > 0 or not sums:
        # n_min == 0 with a non-empty sweep has an empty tail: nothing to add.
        sums.append(tail_sum)
        lengths.append(n_min)
    return _make_fit(sums, lengths)


def _shifted_boundary(preds_sorted: np.ndarray, i: int, strict_gaps: np.ndarray) -> float | None:
    """Boundary between records i-1 and i, moved off tied prediction values.

    The natural boundary is the midpoint of the straddling predictions. When
    those are equal the midpoint would split a tie group, so the boundary
    moves to the nearest strictly increasing adjacent pair, rightward first
    and then leftward. Returns None when every prediction is identical.
    """
    if preds_sorted[i - 1] < preds_sorted[i]:
        return float((preds_sorted[i - 1] + preds_sorted[i]) / 2.0)
    pos = np.searchsorted(strict_gaps, i - 1)
    if pos < strict_gaps.size:
        g = int(strict_gaps[pos])  # nearest strict pair at or right of (i-1, i)
    elif pos > 0:
        g = int(strict_gaps[pos - 1])  # nearest strict pair to the left
    else:
        return None
    return float((preds_sorted[g] + preds_sorted[g + 1]) / 2.0)


def _bins_from_boundaries(boundaries: list[float]) -> BinSet:
    # Midpoints can round onto 0 or 1 when the straddling predictions sit
    # within an ulp of the endpoints; such boundaries are vacuous.
    uniq = sorted({b for b in boundaries if 0.0 < b < 1.0})
    return BinSet.from_edges([0.0, *uniq, 1.0])


def equispaced_bins(num_bins: int) -> BinSet:
    """num_bins bins of equal width 1/num_bins, the last closed at 1."""
    if num_bins < 1:
        raise ValueError("need at least one bin")
    return BinSet.from_edges(np.arange(num_bins + 1) / num_bins)


def quantile_bins(dataset: Dataset, num_bins: int) -> BinSet:
    """Bins holding near-equal record counts, cut at prediction midpoints.

    Cut positions sit at the j*N/num_bins order statistics; each boundary is
    the midpoint of the straddling sorted predictions, shifted off ties the
    same way as :func:`bins_from_fit`. Duplicate boundaries collapse, so the
    result can have fewer than num_bins bins.
    """
    if num_bins < 1:
        raise ValueError("need at least one bin")
    _, preds = sorted_view(dataset)
    n = preds.size
    strict_gaps = np.flatnonzero(preds[1:] > preds[:-1])
    boundaries = []
    for j in range(1, num_bins):
        cut = (j * n) // num_bins
        if 0 < cut < n:
            b = _shifted_boundary(preds, cut, strict_gaps)
            if b is not None:
                boundaries.append(b)
    return _bins_from_boundaries(boundaries)


def bins_from_fit(fit: IsotonicFit, preds_sorted) -> BinSet:
    """Bins with one boundary at each change point of the fitted sequence.

    Each boundary is the midpoint of the adjacent predictions straddling the
    change point; ties are shifted per :func:`_shifted_boundary` and duplicate
    boundaries collapse.
    """
    preds = np.asarray(preds_sorted, dtype=np.float64)
    if preds.shape[0] != fit.fitted.shape[0]:
        raise ValueError("fit and predictions must have equal length")
    if np.any(preds[1:] < preds[:-1]):
        raise ValueError("predictions must be sorted ascending")
    strict_gaps = np.flatnonzero(preds[1:] > preds[:-1])
    changes = np.flatnonzero(fit.fitted[1:] != fit.fitted[:-1]) + 1
    boundaries = []
    for i in changes.tolist():
        b = _shifted_boundary(preds, i, strict_gaps)
        if b is not None:
            boundaries.append(b)
    return _bins_from_boundaries(boundaries)


def total_error(dataset: Dataset, bins: BinSet) -> float:
    """Size-weighted mean of the within-bin label variances.

    Equals (1/N) * sum over bins of sum over members of (y - bin label mean)^2;
    empty bins contribute nothing.
    """
    binned = partition(dataset, bins)
    acc = 0.0
    for b in range(len(bins)):
        if binned.counts[b] == 0:
            continue
        y = binned.labels_in(b)
        acc += float(np.sum((y - binned.empirical_prob[b]) ** 2))
    return acc / dataset.n


def within_bin_error_avg(dataset: Dataset, bins: BinSet) -> float:
    """Unweighted mean over non-empty bins of the within-bin label variance."""
    binned = partition(dataset, bins)
    errs = []
    for b in range(len(bins)):
        if binned.counts[b] == 0:
            continue
        y = binned.labels_in(b)
        errs.append(float(np.mean((y - binned.empirical_prob[b]) ** 2)))
    return float(np.mean(errs))


def brute_force_optimal(labels_sorted) -> tuple[tuple[tuple[int, int], ...], float]:
    """Exhaustive minimum of the weighted within-block variance over all
    contiguous partitions with non-decreasing block means.

    Enumerates every contiguous partition (2^(N-1) of them), keeps the
    monotone ones, and returns one argmin as ((start, length), ...) plus the
    objective value. Serves as an independent oracle for the isotonic route;
    refuses N > 16.
    """
    y = _as_binary(labels_sorted)
    n = y.size
    if n > 16:
        raise ValueError("brute force enumeration is limited to N <= 16")
    prefix = np.concatenate(([0], np.cumsum(y)))
    best_obj = None
    best_blocks = None
    for mask in range(1 << (n - 1)):
        cuts = [0]
        cuts.extend(i + 1 for i in range(n - 1) if mask >> i & 1)
        cuts.append(n)
        sums = [int(prefix[b] - prefix[a]) for a, b in zip(cuts, cuts[1:])]
        lens = [b - a for a, b in zip(cuts, cuts[1:])]
        ok = all(
            sums[i] * lens[i + 1] <= sums[i + 1] * lens[i] for i in range(len(sums) - 1)
        )
        if not ok:
            continue
        obj = sum(s - s * s / w for s, w in zip(sums, lens)) / n
        if best_obj is None or obj < best_obj:
            best_obj = obj
            best_blocks = tuple((a, b - a) for a, b in zip(cuts, cuts[1:]))
    assert best_obj is not None  # the single-block partition is always monotone
    return best_blocks, float(best_obj)


def monotonicity_report(fit: IsotonicFit) -> list[tuple[int, int]]:
    """Adjacent block index pairs (b-1, b) whose means decrease.

    Always empty for unconstrained fits; the block-constrained variant can
    produce a few mild violations. Comparisons use the integer label sums.
    """
    sums = fit.block_label_sums
    lens = fit.block_lengths
    out = []
    for b in range(1, len(sums)):
        if int(sums[b]) * int(lens[b - 1]) < int(sums[b - 1]) * int(lens[b]):
            out.append((b - 1, b))
    return out


@dataclass(frozen=True)
class BinStrategy:
    """A named bin-construction recipe resolvable against a dataset.

    ``n_min``/``n_max`` override the fractional defaults (N/20 and N/5) for
    the block-constrained strategy when set.
    """

    kind: str = "pava_bc"
    num_bins: int = 10
    nmin_frac: float = 1 / 20
    nmax_frac: float = 1 / 5
    n_min: int | None = None
    n_max: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise ValueError(f"unknown strategy {self.kind!r}; expected one of {STRATEGY_KINDS}")
        if self.kind in ("equispaced", "quantile") and self.num_bins < 1:
            raise ValueError("need at least one bin")

    def resolve_sizes(self, n: int) -> tuple[int, int]:
        n_min = self.n_min if self.n_min is not None else int(n * self.nmin_frac)
        n_max = self.n_max if self.n_max is not None else int(n * self.nmax_frac)
        # fractional defaults floor to 0 on tiny datasets; a zero-size cap is
        # unsatisfiable, so keep at least one record per block
        n_max = max(n_max, 1)
        return min(n_min, n_max), n_max


def build_bins(dataset: Dataset, strategy: BinStrategy) -> BinSet:
    """Construct bins for a dataset under the given strategy."""
    if strategy.kind == "equispaced":
        return equispaced_bins(strategy.num_bins)
    if strategy.kind == "quantile":
        return quantile_bins(dataset, strategy.num_bins)
    labels, preds = sorted_view(dataset)
    if strategy.kind == "pava":
        fit = pava(labels)
    else:
        n_min, n_max = strategy.resolve_sizes(dataset.n)
        fit = pava_bc(labels, n_min, n_max)
    return bins_from_fit(fit, preds)
