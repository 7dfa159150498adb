import numpy as np
import pytest

from caltest.binning import (
    BinStrategy,
    IsotonicFit,
    bins_from_fit,
    brute_force_optimal,
    build_bins,
    equispaced_bins,
    monotonicity_report,
    pava,
    pava_bc,
    quantile_bins,
    total_error,
    within_bin_error_avg,
)
from caltest.core import BinSet, Dataset, partition, sorted_view


def make_fit(sums, lengths):
    lengths = np.asarray(lengths, dtype=np.int64)
    sums = np.asarray(sums, dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    return IsotonicFit(
        fitted=np.repeat(sums / lengths, lengths),
        block_starts=starts,
        block_lengths=lengths,
        block_label_sums=sums,
    )


def test_equispaced_examples():
    assert equispaced_bins(2).edges.tolist() == [0.0, 0.5, 1.0]
    assert equispaced_bins(1).edges.tolist() == [0.0, 1.0]
    edges = equispaced_bins(10).edges
    assert edges.tolist() == [k / 10 for k in range(11)]
    with pytest.raises(ValueError):
        equispaced_bins(0)


def test_quantile_examples():
    ds = Dataset(np.array([0.1, 0.2, 0.3, 0.4]), np.array([0, 0, 1, 1]))
    assert quantile_bins(ds, 2).edges.tolist() == [0.0, 0.25, 1.0]

    tied = Dataset(np.full(9, 0.7), np.zeros(9, dtype=int))
    assert quantile_bins(tied, 5).edges.tolist() == [0.0, 1.0]

    assert quantile_bins(ds, 1).edges.tolist() == [0.0, 1.0]


def test_quantile_never_splits_ties():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(2, 120))
        preds = rng.integers(0, 6, n) / 6 + 1 / 12  # heavy ties
        ds = Dataset(preds, rng.integers(0, 2, n))
        bins = quantile_bins(ds, int(rng.integers(1, 12)))
        idx = bins.assign(ds.predictions)
        for value in np.unique(ds.predictions):
            assert len(np.unique(idx[ds.predictions == value])) == 1


def test_pava_examples():
    assert pava([0, 0, 1, 1]).fitted.tolist() == [0, 0, 1, 1]
    assert pava([1, 0]).fitted.tolist() == [0.5, 0.5]
    fit = pava([0, 1, 0, 1])
    assert fit.fitted.tolist() == [0.0, 0.5, 0.5, 1.0]
    assert fit.blocks == ((0, 1, 0.0), (1, 2, 0.5), (3, 1, 1.0))
    with pytest.raises(ValueError):
        pava([])


def test_pava_is_monotone_with_increasing_block_means():
    rng = np.random.default_rng(4)
    for _ in range(100):
        y = rng.integers(0, 2, int(rng.integers(1, 150)))
        fit = pava(y)
        assert np.all(np.diff(fit.fitted) >= 0)
        assert np.all(np.diff(fit.block_means) > 0)
        assert int(fit.block_lengths.sum()) == y.size
        # block means equal the mean of the labels they cover
        for start, length, mean in fit.blocks:
            assert y[start : start + length].mean() == mean


def test_pava_bc_hand_trace():
    fit = pava_bc([1, 0, 0, 1], 2, 3)
    assert fit.blocks == ((0, 2, 0.5), (2, 2, 0.5))
    assert fit.fitted.tolist() == [0.5] * 4


def test_pava_bc_reserved_tail_branch():
    # With n_max=3 the reserved final pair cannot merge and forms its own block.
    fit = pava_bc([0, 0, 1, 1], 2, 3)
    assert fit.blocks == ((0, 2, 0.0), (2, 2, 1.0))
    # With n_max=4 the merge fits (2 + 2 <= 4), so the sweep pools everything.
    fit = pava_bc([0, 0, 1, 1], 2, 4)
    assert fit.blocks == ((0, 4, 0.5),)


def test_pava_bc_whole_input_reserved():
    fit = pava_bc([0, 1, 1], 3, 3)
    assert fit.blocks == ((0, 3, 2 / 3),)


def test_pava_bc_unconstrained_equals_pava():
    rng = np.random.default_rng(6)
    for _ in range(100):
        y = rng.integers(0, 2, int(rng.integers(1, 150)))
        assert np.array_equal(pava_bc(y, 0, y.size).fitted, pava(y).fitted)


def test_pava_bc_size_guarantees():
    rng = np.random.default_rng(8)
    for _ in range(100):
        n = int(rng.integers(2, 400))
        y = (rng.random(n) < rng.uniform(0.05, 0.5)).astype(int)
        n_min = int(rng.integers(0, n // 2 + 1))
        n_max = int(rng.integers(max(n_min, 1), n + 1))
        fit = pava_bc(y, n_min, n_max)
        assert int(fit.block_lengths.sum()) == n
        assert np.all(fit.block_lengths <= n_max)
        assert fit.block_lengths[-1] >= min(n_min, n)


def test_pava_bc_validation():
    with pytest.raises(ValueError):
        pava_bc([0, 1], 2, 1)
    with pytest.raises(ValueError):
        pava_bc([0, 1], 0, 3)


def test_bins_from_fit_examples():
    fit = make_fit([0, 2], [2, 2])
    bins = bins_from_fit(fit, np.array([0.1, 0.2, 0.6, 0.8]))
    assert bins.edges.tolist() == [0.0, 0.4, 1.0]

    flat = make_fit([2], [4])
    assert bins_from_fit(flat, np.array([0.1, 0.2, 0.6, 0.8])).edges.tolist() == [0.0, 1.0]

    # tie at the change point: boundary shifts to the next strict gap
    fit = make_fit([0, 1, 1], [1, 1, 1])
    bins = bins_from_fit(fit, np.array([0.5, 0.5, 0.9]))
    assert bins.edges.tolist() == [0.0, 0.7, 1.0]

    with pytest.raises(ValueError):
        bins_from_fit(flat, np.array([0.1, 0.2]))


def test_bins_from_fit_all_predictions_tied():
    fit = make_fit([0, 1], [1, 1])
    assert bins_from_fit(fit, np.array([0.3, 0.3])).edges.tolist() == [0.0, 1.0]


def test_fit_bins_never_split_ties():
    rng = np.random.default_rng(10)
    for _ in range(50):
        n = int(rng.integers(2, 100))
        preds = np.sort(rng.integers(0, 5, n) / 5 + 0.1)
        labels = rng.integers(0, 2, n)
        bins = bins_from_fit(pava(labels), preds)
        idx = bins.assign(preds)
        for value in np.unique(preds):
            assert len(np.unique(idx[preds == value])) == 1


def test_total_error_examples():
    one_bin = BinSet.from_edges([0.0, 1.0])
    ds = Dataset(np.array([0.4, 0.6]), np.array([0, 1]))
    assert total_error(ds, one_bin) == pytest.approx(0.25)
    assert within_bin_error_avg(ds, one_bin) == pytest.approx(0.25)

    # one point per bin gives zero error
    ds4 = Dataset(np.array([0.1, 0.3, 0.6, 0.9]), np.array([0, 1, 0, 1]))
    singles = BinSet.from_edges([0.0, 0.2, 0.5, 0.8, 1.0])
    assert total_error(ds4, singles) == 0.0


def test_within_bin_error_is_unweighted_mean():
    # two bins with variances 0.25 and 0 -> average 0.125
    ds = Dataset(np.array([0.1, 0.2, 0.8, 0.9]), np.array([0, 1, 1, 1]))
    bins = BinSet.from_edges([0.0, 0.5, 1.0])
    assert within_bin_error_avg(ds, bins) == pytest.approx(0.125)
    assert total_error(ds, bins) == pytest.approx(0.125)


def test_refining_a_partition_never_increases_total_error():
    rng = np.random.default_rng(12)
    for _ in range(50):
        n = int(rng.integers(2, 150))
        ds = Dataset(rng.random(n), rng.integers(0, 2, n))
        interior = np.unique(rng.random(int(rng.integers(0, 4))))
        interior = interior[(interior > 0) & (interior < 1)]
        coarse = BinSet.from_edges([0.0, *interior.tolist(), 1.0])
        extra = float(rng.random())
        if extra in (0.0, 1.0) or extra in interior:
            continue
        fine = BinSet.from_edges(sorted({0.0, 1.0, extra, *interior.tolist()}))
        assert total_error(ds, fine) <= total_error(ds, coarse) + 1e-12


def test_brute_force_examples():
    blocks, objective = brute_force_optimal([0, 1])
    assert objective == 0.0 and blocks == ((0, 1), (1, 1))

    blocks, objective = brute_force_optimal([1, 0])
    assert objective == pytest.approx(0.25) and blocks == ((0, 2),)

    blocks, objective = brute_force_optimal([0, 1, 0, 1])
    assert objective == pytest.approx(0.125)
    assert blocks == ((0, 1), (1, 2), (3, 1))  # matches the pooled fit

    with pytest.raises(ValueError):
        brute_force_optimal([0, 1] * 9)


def test_pava_attains_brute_force_minimum():
    rng = np.random.default_rng(14)
    for _ in range(60):
        n = int(rng.integers(1, 13))
        labels = rng.integers(0, 2, n)
        preds = (np.arange(n) + 0.5) / n
        ds = Dataset(preds, labels)
        bins = bins_from_fit(pava(labels), preds)
        _, best = brute_force_optimal(labels)
        assert total_error(ds, bins) == pytest.approx(best, abs=1e-12)


def test_monotonicity_report():
    rng = np.random.default_rng(16)
    for _ in range(50):
        y = rng.integers(0, 2, int(rng.integers(1, 100)))
        assert monotonicity_report(pava(y)) == []

    fit = make_fit([1, 1, 1], [5, 10, 2])  # means 0.2, 0.1, 0.5
    assert monotonicity_report(fit) == [(0, 1)]

    # report is consistent with independently recomputed block means
    for _ in range(50):
        n = int(rng.integers(4, 300))
        y = (rng.random(n) < 0.15).astype(int)
        n_min = int(rng.integers(1, max(2, n // 8)))
        n_max = int(rng.integers(n_min, n + 1))
        fit = pava_bc(y, n_min, n_max)
        means = [y[s : s + w].mean() for s, w, _ in fit.blocks]
        expected = [(b - 1, b) for b in range(1, len(means)) if means[b] < means[b - 1]]
        assert monotonicity_report(fit) == expected


def test_build_bins_strategies():
    rng = np.random.default_rng(18)
    ds = Dataset(rng.random(200), rng.integers(0, 2, 200))
    assert len(build_bins(ds, BinStrategy("equispaced", num_bins=10))) == 10
    assert len(build_bins(ds, BinStrategy("quantile", num_bins=10))) <= 10
    for kind in ("pava", "pava_bc"):
        bins = build_bins(ds, BinStrategy(kind))
        binned = partition(ds, bins)
        assert int(binned.counts.sum()) == 200
    with pytest.raises(ValueError):
        BinStrategy("fancy")


def test_build_bins_matches_fit_blocks_on_distinct_predictions():
    # with all-distinct predictions the bins reproduce the fit blocks exactly
    rng = np.random.default_rng(20)
    ds = Dataset(np.sort(rng.random(120)), rng.integers(0, 2, 120))
    labels, preds = sorted_view(ds)
    fit = pava_bc(labels, 10, 40)
    bins = bins_from_fit(fit, preds)
    counts = partition(ds, bins).counts
    merged = [w for _, w, _ in fit.blocks]
    # adjacent equal-mean blocks merge into one bin
    assert int(counts.sum()) == 120
    assert len(counts) <= len(merged)
