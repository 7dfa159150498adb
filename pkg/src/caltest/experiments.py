"""Synthetic experiment harness: prevalence-shift scenarios and sensitivity sweeps.

A scenario trains a logistic model on data simulated at one prevalence and
scores test data simulated at another. Matching prevalences give a
well-calibrated model; shifting the test prevalence miscalibrates it by a
known amount. Each scenario is replicated over seeds and summarized as
mean/stddev per metric.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Dataset
from .metrics import ace, ece, mce, tce_variants
from .stattest import TestConfig
from .synthdata import GdaConfig, fit_logistic, perturb_logit_normal, predict_logistic, sample

__all__ = [
    "BatteryConfig",
    "METRIC_COLUMNS",
    "SWEEP_PARAMETERS",
    "metric_battery",
    "run_scenario",
    "simulate",
    "run_sweep",
]

METRIC_COLUMNS = ("TCE", "TCE(Q)", "TCE(V)", "ECE", "ACE", "MCE", "MCE(Q)")

DEFAULT_TRAIN_SIZE = 14000
DEFAULT_TEST_SIZE = 6000

SWEEP_PARAMETERS = (
    "n_min",
    "n_max",
    "binsize_range",
    "noise",
    "alpha",
    "test_kind",
    "data_size",
    "prevalence",
)


@dataclass(frozen=True)
class BatteryConfig:
    """Settings shared by every metric in the standard comparison battery."""

    test: TestConfig = field(default_factory=TestConfig)
    num_bins: int = 10
    nmin_frac: float = 1 / 20
    nmax_frac: float = 1 / 5
    n_min: int | None = None
    n_max: int | None = None
    norm: str = "weighted_l1"


def metric_battery(dataset: Dataset, cfg: BatteryConfig = BatteryConfig()) -> dict[str, float]:
    """All seven comparison metrics for one dataset, keyed by column name."""
    variants = tce_variants(
        dataset,
        cfg.test,
        num_bins=cfg.num_bins,
        nmin_frac=cfg.nmin_frac,
        nmax_frac=cfg.nmax_frac,
        n_min=cfg.n_min,
        n_max=cfg.n_max,
        norm=cfg.norm,
    )
    return {
        "TCE": variants["TCE(P)"].value,
        "TCE(Q)": variants["TCE(Q)"].value,
        "TCE(V)": variants["TCE(V)"].value,
        "ECE": ece(dataset, cfg.num_bins).value,
        "ACE": ace(dataset, cfg.num_bins).value,
        "MCE": mce(dataset, cfg.num_bins, "equispaced").value,
        "MCE(Q)": mce(dataset, cfg.num_bins, "quantile").value,
    }


def scenario_dataset(
    train_prevalence: float,
    test_prevalence: float,
    n_train: int,
    n_test: int,
    seed: int,
    noise_sigma: float = 0.0,
) -> Dataset:
    """Fit the logistic model on one simulated draw and score a fresh test draw."""
    train_x, train_y = sample(GdaConfig(prevalence=train_prevalence, seed=2 * seed), n_train)
    test_x, test_y = sample(GdaConfig(prevalence=test_prevalence, seed=2 * seed + 1), n_test)
    b0, b1 = fit_logistic(train_x, train_y)
    preds = predict_logistic(test_x, b0, b1)
    if noise_sigma > 0.0:
        preds = perturb_logit_normal(preds, noise_sigma, seed=3 * seed + 1)
    return Dataset(preds, test_y)


def run_scenario(
    train_prevalence: float,
    test_prevalence: float,
    n_train: int = DEFAULT_TRAIN_SIZE,
    n_test: int = DEFAULT_TEST_SIZE,
    seed: int = 0,
    cfg: BatteryConfig = BatteryConfig(),
    noise_sigma: float = 0.0,
) -> dict[str, float]:
    """One seed of one train/test prevalence pair; returns the metric battery."""
    dataset = scenario_dataset(
        train_prevalence, test_prevalence, n_train, n_test, seed, noise_sigma
    )
    return metric_battery(dataset, cfg)


def _aggregate_seeds(rows: list[dict[str, float]]) -> dict[str, dict[str, float]]:
    out = {}
    for column in METRIC_COLUMNS:
        values = np.array([r[column] for r in rows])
        out[column] = {"mean": float(values.mean()), "std": float(values.std(ddof=0))}
    return out


def simulate(
    pairs: list[tuple[float, float]],
    n_seeds: int = 20,
    n_train: int = DEFAULT_TRAIN_SIZE,
    n_test: int = DEFAULT_TEST_SIZE,
    base_seed: int = 0,
    cfg: BatteryConfig = BatteryConfig(),
) -> list[dict]:
    """Replicate each prevalence pair over seeds and summarize the battery.

    Returns one entry per pair with per-seed values and mean/std summaries.
    """
    results = []
    for train_prev, test_prev in pairs:
        rows = [
            run_scenario(train_prev, test_prev, n_train, n_test, base_seed + s, cfg)
            for s in range(n_seeds)
        ]
        results.append(
            {
                "train_prevalence": train_prev,
                "test_prevalence": test_prev,
                "n_train": n_train,
                "n_test": n_test,
                "n_seeds": n_seeds,
                "summary": _aggregate_seeds(rows),
                "per_seed": rows,
            }
        )
    return results


def _battery_for_point(parameter: str, value, base: BatteryConfig, n_test: int) -> BatteryConfig:
    """Battery settings with one sweep parameter overridden.

    Size constraints are clamped so the pair stays valid when the swept value
    crosses the other bound, mirroring how a fixed opposite bound behaves in
    practice.
    """
    if parameter == "n_min":
        n_min = int(value)
        n_max = base.n_max if base.n_max is not None else int(n_test * base.nmax_frac)
        return BatteryConfig(
            test=base.test, num_bins=base.num_bins, norm=base.norm,
            n_min=n_min, n_max=max(n_max, n_min),
        )
    if parameter == "n_max":
        n_max = int(value)
        n_min = base.n_min if base.n_min is not None else int(n_test * base.nmin_frac)
        return BatteryConfig(
            test=base.test, num_bins=base.num_bins, norm=base.norm,
            n_min=min(n_min, n_max), n_max=n_max,
        )
    if parameter == "binsize_range":
        n_min, n_max = (int(v) for v in value)
        return BatteryConfig(
            test=base.test, num_bins=base.num_bins, norm=base.norm,
            n_min=n_min, n_max=n_max,
        )
    if parameter == "alpha":
        return BatteryConfig(
            test=TestConfig(base.test.kind, float(value)),
            num_bins=base.num_bins, norm=base.norm,
            nmin_frac=base.nmin_frac, nmax_frac=base.nmax_frac,
            n_min=base.n_min, n_max=base.n_max,
        )
    if parameter == "test_kind":
        return BatteryConfig(
            test=TestConfig(str(value), base.test.alpha),
            num_bins=base.num_bins, norm=base.norm,
            nmin_frac=base.nmin_frac, nmax_frac=base.nmax_frac,
            n_min=base.n_min, n_max=base.n_max,
        )
    return base


def run_sweep(
    parameter: str,
    grid: list,
    scenarios: list[tuple[float, float]] | None = None,
    n_seeds: int = 5,
    n_train: int = DEFAULT_TRAIN_SIZE,
    n_test: int = DEFAULT_TEST_SIZE,
    base_seed: int = 0,
    cfg: BatteryConfig = BatteryConfig(),
) -> list[dict]:
    """Sensitivity sweep of one parameter over a grid, per scenario.

    Invalid grid points produce an error entry and the sweep continues.
    Scenarios default to a calibrated pair (0.5, 0.5) and a miscalibrated
    pair (0.5, 0.4).
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}")
    if parameter == "prevalence":
        # The grid itself carries the train/test pairs; one block covers it.
        scenarios = [(None, None)]
    elif scenarios is None:
        scenarios = [(0.5, 0.5), (0.5, 0.4)]

    results = []
    for train_prev, test_prev in scenarios:
        block = {"train_prevalence": train_prev, "test_prevalence": test_prev, "points": []}
        for value in grid:
            point: dict = {"value": value}
            try:
                noise = 0.0
                size = n_test
                pair = (train_prev, test_prev)
                point_cfg = cfg
                if parameter == "noise":
                    noise = float(value)
                    if noise < 0.0:
                        raise ValueError("noise scale must be non-negative")
                elif parameter == "data_size":
                    size = int(value)
                    if size < 1:
                        raise ValueError("data size must be positive")
                elif parameter == "prevalence":
                    pair = (float(value[0]), float(value[1]))
                else:
                    point_cfg = _battery_for_point(parameter, value, cfg, n_test)
                rows = [
                    run_scenario(
                        pair[0], pair[1], n_train, size,
                        base_seed + s, point_cfg, noise_sigma=noise,
                    )
                    for s in range(n_seeds)
                ]
                point["summary"] = _aggregate_seeds(rows)
            except (ValueError, TypeError) as exc:
                point["error"] = str(exc)
            block["points"].append(point)
        results.append(block)
    return results
