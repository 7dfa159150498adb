import numpy as np
import pytest

from caltest.core import Bin, BinSet, Dataset, partition, sorted_view


def random_binset(rng, max_interior=6):
    k = int(rng.integers(0, max_interior + 1))
    interior = np.sort(rng.random(k))
    interior = np.unique(interior[(interior > 0) & (interior < 1)])
    return BinSet.from_edges([0.0, *interior.tolist(), 1.0])


def random_dataset(rng, n=None):
    n = n or int(rng.integers(1, 200))
    return Dataset(rng.random(n), rng.integers(0, 2, n))


def test_partition_hand_example():
    ds = Dataset(np.array([0.2, 0.3, 0.7, 0.9]), np.array([0, 1, 1, 1]))
    binned = partition(ds, BinSet.from_edges([0.0, 0.5, 1.0]))
    assert binned.counts.tolist() == [2, 2]
    assert binned.empirical_prob.tolist() == [0.5, 1.0]
    assert binned.mean_prediction.tolist() == [0.25, 0.8]


def test_partition_single_bin_is_identity():
    rng = np.random.default_rng(1)
    ds = random_dataset(rng, 50)
    binned = partition(ds, BinSet.from_edges([0.0, 1.0]))
    assert binned.counts.tolist() == [50]
    assert binned.empirical_prob[0] == ds.labels.mean()


def test_partition_keeps_empty_bins_flagged():
    ds = Dataset(np.zeros(5), np.zeros(5, dtype=int))
    binned = partition(ds, BinSet.from_edges([0.0, 0.4, 1.0]))
    assert binned.counts.tolist() == [5, 0]
    assert binned.is_empty.tolist() == [False, True]
    assert np.isnan(binned.empirical_prob[1])


def test_partition_boundary_value_goes_right():
    ds = Dataset(np.array([0.5, 1.0]), np.array([1, 1]))
    binned = partition(ds, BinSet.from_edges([0.0, 0.5, 1.0]))
    assert binned.counts.tolist() == [0, 2]


def test_partition_is_exhaustive_and_exclusive():
    rng = np.random.default_rng(7)
    for _ in range(100):
        ds = random_dataset(rng)
        binned = partition(ds, random_binset(rng))
        assert int(binned.counts.sum()) == ds.n
        together = np.sort(np.concatenate(binned.members))
        assert together.tolist() == list(range(ds.n))


def test_partition_invariant_under_permutation():
    rng = np.random.default_rng(11)
    for _ in range(30):
        ds = random_dataset(rng, 120)
        bins = random_binset(rng)
        perm = rng.permutation(ds.n)
        shuffled = Dataset(ds.predictions[perm], ds.labels[perm])
        a = partition(ds, bins)
        b = partition(shuffled, bins)
        assert a.counts.tolist() == b.counts.tolist()
        assert np.array_equal(a.empirical_prob, b.empirical_prob, equal_nan=True)


def test_mean_prediction_stays_inside_its_bin():
    rng = np.random.default_rng(13)
    for _ in range(50):
        ds = random_dataset(rng)
        bins = random_binset(rng)
        binned = partition(ds, bins)
        for b, interval in enumerate(bins.bins):
            if binned.counts[b]:
                assert interval.lower <= binned.mean_prediction[b] <= interval.upper


def test_weights_sum_to_one():
    rng = np.random.default_rng(17)
    ds = random_dataset(rng, 77)
    binned = partition(ds, random_binset(rng))
    assert binned.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_sorted_view_examples():
    labels, preds = sorted_view(Dataset(np.array([0.9, 0.1]), np.array([1, 0])))
    assert labels.tolist() == [0, 1]
    assert preds.tolist() == [0.1, 0.9]

    labels, _ = sorted_view(Dataset(np.array([0.5, 0.5]), np.array([1, 0])))
    assert labels.tolist() == [1, 0]  # stable on ties

    labels, _ = sorted_view(Dataset(np.array([0.3, 0.1, 0.2]), np.array([1, 0, 1])))
    assert labels.tolist() == [0, 1, 1]


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.array([1.2]), np.array([0]))
    with pytest.raises(ValueError):
        Dataset(np.array([-0.1]), np.array([0]))
    with pytest.raises(ValueError):
        Dataset(np.array([0.5]), np.array([2]))
    with pytest.raises(ValueError):
        Dataset(np.array([]), np.array([]))
    with pytest.raises(ValueError):
        Dataset(np.array([0.5, 0.6]), np.array([1]))


def test_dataset_arrays_are_read_only():
    ds = Dataset(np.array([0.5]), np.array([1]))
    with pytest.raises(ValueError):
        ds.predictions[0] = 0.9


def test_bin_and_binset_validation():
    with pytest.raises(ValueError):
        Bin(0.5, 0.5)
    with pytest.raises(ValueError):
        Bin(-0.1, 0.5)
    with pytest.raises(ValueError):
        BinSet.from_edges([0.0, 0.5])  # does not end at 1
    with pytest.raises(ValueError):
        BinSet.from_edges([0.1, 0.5, 1.0])  # does not start at 0
    with pytest.raises(ValueError):
        BinSet.from_edges([0.0, 0.5, 0.5, 1.0])
    # last bin closed, others half-open
    bs = BinSet.from_edges([0.0, 0.4, 1.0])
    assert not bs.bins[0].closed_upper
    assert bs.bins[1].closed_upper
    assert bs.bins[0].contains(0.0) and not bs.bins[0].contains(0.4)
    assert bs.bins[1].contains(1.0)
