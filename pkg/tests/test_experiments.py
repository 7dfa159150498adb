import numpy as np
import pytest

from caltest.experiments import (
    METRIC_COLUMNS,
    BatteryConfig,
    metric_battery,
    run_scenario,
    run_sweep,
    simulate,
)
from caltest.core import Dataset
from caltest.stattest import TestConfig


def test_run_scenario_is_deterministic():
    a = run_scenario(0.5, 0.4, n_train=1500, n_test=500, seed=3)
    b = run_scenario(0.5, 0.4, n_train=1500, n_test=500, seed=3)
    c = run_scenario(0.5, 0.4, n_train=1500, n_test=500, seed=4)
    assert a == b
    assert a != c
    assert tuple(a) == METRIC_COLUMNS


def test_simulate_aggregates_mean_and_std():
    results = simulate([(0.5, 0.5)], n_seeds=3, n_train=1200, n_test=400)
    entry = results[0]
    values = [row["ECE"] for row in entry["per_seed"]]
    assert entry["summary"]["ECE"]["mean"] == pytest.approx(np.mean(values))
    assert entry["summary"]["ECE"]["std"] == pytest.approx(np.std(values))


def test_sweep_unknown_parameter_rejected():
    with pytest.raises(ValueError):
        run_sweep("bogus", [1])


def test_sweep_min_blocksize_degrades_calibrated_scores():
    # a minimum block of half the data forces two giant bins and the
    # calibrated model starts failing the per-record tests wholesale
    rows = run_sweep(
        "n_min",
        [300, 3000],
        scenarios=[(0.5, 0.5)],
        n_seeds=3,
    )
    points = rows[0]["points"]
    small = points[0]["summary"]["TCE"]["mean"]
    large = points[1]["summary"]["TCE"]["mean"]
    assert large > small + 30.0


def test_sweep_noise_increases_calibrated_scores():
    rows = run_sweep(
        "noise",
        [0.0, 0.5],
        scenarios=[(0.5, 0.5)],
        n_seeds=3,
    )
    points = rows[0]["points"]
    clean = points[0]["summary"]["TCE"]["mean"]
    noisy = points[1]["summary"]["TCE"]["mean"]
    assert noisy > clean + 20.0


def test_sweep_prevalence_pairs_form_single_block():
    rows = run_sweep(
        "prevalence",
        [(0.5, 0.5), (0.5, 0.4)],
        n_seeds=1,
        n_train=1200,
        n_test=400,
    )
    assert len(rows) == 1
    assert rows[0]["train_prevalence"] is None
    assert len(rows[0]["points"]) == 2


def test_sweep_test_kind_runs_both_tests():
    rows = run_sweep(
        "test_kind",
        ["binomial", "t"],
        scenarios=[(0.5, 0.4)],
        n_seeds=1,
        n_train=1200,
        n_test=400,
    )
    for point in rows[0]["points"]:
        assert "summary" in point


def test_battery_respects_explicit_block_sizes():
    rng = np.random.default_rng(33)
    ds = Dataset(rng.random(400), rng.integers(0, 2, 400))
    loose = metric_battery(ds, BatteryConfig(test=TestConfig(alpha=0.01)))
    tight = metric_battery(ds, BatteryConfig(test=TestConfig(alpha=0.5)))
    assert loose["TCE"] <= tight["TCE"] + 1e-12
