"""Calibration error metrics over binned predictions.

Every metric here is an instance of one scheme: compute a per-bin loss, then
aggregate the per-bin losses with a norm. The absolute-gap metrics (ECE, ACE,
MCE) use |label mean - prediction mean| per bin; the test-based metric uses
the percentage of predictions in the bin rejected by a statistical test
against the bin's labels, which keeps its value on a fixed [0, 100] scale
regardless of class prevalence.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Mapping

import numpy as np

from .binning import BinStrategy, build_bins, quantile_bins, equispaced_bins
from .core import Bin, BinSet, Dataset, partition
from .stattest import TestConfig, binom_pvalues_sweep, t_pvalues_sweep

__all__ = [
    "BinMetric",
    "MetricReport",
    "gce",
    "ece",
    "ace",
    "mce",
    "tce",
    "tce_variants",
    "tce_classwise",
]

NORMS = ("weighted_l1", "sup")


@dataclass(frozen=True)
class BinMetric:
    """Per-bin slice of a metric report; statistics are NaN for empty bins."""

    bin: Bin
    count: int
    empirical_prob: float
    mean_prediction: float
    loss: float


@dataclass(frozen=True)
class MetricReport:
    name: str
    value: float
    per_bin: tuple[BinMetric, ...]
    config: Mapping[str, object]


def _aggregate(losses: np.ndarray, weights: np.ndarray, counts: np.ndarray, norm: str) -> float:
    """Aggregate per-bin losses; empty bins carry zero weight and are excluded from sup."""
    if norm not in NORMS:
        raise ValueError(f"unknown norm {norm!r}; expected one of {NORMS}")
    filled = counts > 0
    if not np.any(filled):
        raise ValueError("all bins are empty")
    if norm == "weighted_l1":
        return float(np.sum(weights[filled] * np.abs(losses[filled])))
    return float(np.max(np.abs(losses[filled])))


def _report(name, binned, losses, value, config) -> MetricReport:
    per_bin = tuple(
        BinMetric(
            bin=binned.bins.bins[b],
            count=int(binned.counts[b]),
            empirical_prob=float(binned.empirical_prob[b]),
            mean_prediction=float(binned.mean_prediction[b]),
            loss=float(losses[b]),
        )
        for b in range(len(binned.bins))
    )
    return MetricReport(name=name, value=value, per_bin=per_bin, config=dict(config))


def gce(
    dataset: Dataset,
    bins: BinSet,
    loss: Callable[[np.ndarray, np.ndarray], float],
    norm: str = "weighted_l1",
    name: str = "GCE",
) -> MetricReport:
    """Generic per-bin-loss metric: ``norm`` applied to ``loss(labels_b, preds_b)``.

    The loss receives each non-empty bin's labels and predictions; empty bins
    are skipped with zero weight.
    """
    binned = partition(dataset, bins)
    losses = np.full(len(bins), np.nan)
    for b in range(len(bins)):
        if binned.counts[b] > 0:
            losses[b] = loss(binned.labels_in(b), binned.predictions_in(b))
    value = _aggregate(losses, binned.weights, binned.counts, norm)
    return _report(name, binned, losses, value, {"norm": norm})


def _gap_metric(dataset, bins, norm, name, config) -> MetricReport:
    binned = partition(dataset, bins)
    losses = np.abs(binned.empirical_prob - binned.mean_prediction)
    value = _aggregate(losses, binned.weights, binned.counts, norm)
    return _report(name, binned, losses, value, config)


def ece(dataset: Dataset, num_bins: int = 10) -> MetricReport:
    """Expected calibration error: size-weighted |label mean - prediction mean|
    over equispaced bins."""
    return _gap_metric(
        dataset,
        equispaced_bins(num_bins),
        "weighted_l1",
        "ECE",
        {"bins": "equispaced", "num_bins": num_bins},
    )


def ace(dataset: Dataset, num_bins: int = 10) -> MetricReport:
    """Adaptive calibration error: the ECE formula over quantile bins."""
    return _gap_metric(
        dataset,
        quantile_bins(dataset, num_bins),
        "weighted_l1",
        "ACE",
        {"bins": "quantile", "num_bins": num_bins},
    )


def mce(dataset: Dataset, num_bins: int = 10, bins_kind: str = "equispaced") -> MetricReport:
    """Maximum calibration error: the worst per-bin gap over non-empty bins."""
    if bins_kind == "equispaced":
        bins = equispaced_bins(num_bins)
        name = "MCE"
    elif bins_kind == "quantile":
        bins = quantile_bins(dataset, num_bins)
        name = "MCE(Q)"
    else:
        raise ValueError(f"unsupported bins_kind {bins_kind!r}")
    return _gap_metric(dataset, bins, "sup", name, {"bins": bins_kind, "num_bins": num_bins})


def _rejection_percent(labels: np.ndarray, preds: np.ndarray, cfg: TestConfig) -> float:
    """Percentage of a bin's predictions rejected against the bin's labels.

    Each prediction is tested as the hypothesized probability for the full
    label set of its bin, own outcome included. Tests within a bin share
    (n, k), so p-values are computed once per distinct prediction value.
    """
    n = int(labels.size)
    uniq, inverse = np.unique(preds, return_inverse=True)
    if cfg.kind == "binomial":
        pvals = binom_pvalues_sweep(n, int(labels.sum()), uniq)
    elif n >= 2:
        pvals = t_pvalues_sweep(labels, uniq)
    else:
        # Degenerate single-record bin under the t-test: apply the same
        # limiting rule as a zero-variance sample.
        pvals = np.where(uniq == float(labels[0]), 1.0, 0.0)
    rejected = pvals[inverse] < cfg.alpha
    return 100.0 * float(np.mean(rejected))


def tce(
    dataset: Dataset,
    bins: BinSet,
    cfg: TestConfig = TestConfig(),
    norm: str = "weighted_l1",
    name: str = "TCE",
) -> MetricReport:
    """Test-based calibration error: per-bin rejection percentages aggregated
    by the norm.

    Under the weighted 1-norm the value equals 100 times the overall fraction
    of predictions rejected, so it always lies in [0, 100].
    """
    binned = partition(dataset, bins)
    losses = np.full(len(bins), np.nan)
    for b in range(len(bins)):
        if binned.counts[b] > 0:
            losses[b] = _rejection_percent(binned.labels_in(b), binned.predictions_in(b), cfg)
    value = _aggregate(losses, binned.weights, binned.counts, norm)
    config = {"test": cfg.kind, "alpha": cfg.alpha, "norm": norm, "num_bins": len(bins)}
    return _report(name, binned, losses, value, config)


def tce_variants(
    dataset: Dataset,
    cfg: TestConfig = TestConfig(),
    num_bins: int = 10,
    nmin_frac: float = 1 / 20,
    nmax_frac: float = 1 / 5,
    n_min: int | None = None,
    n_max: int | None = None,
    norm: str = "weighted_l1",
) -> dict[str, MetricReport]:
    """The test-based metric under its three bin constructions.

    TCE(P) uses block-constrained fits, TCE(Q) quantile bins, TCE(V) the
    unconstrained fit.
    """
    strategies = {
        "TCE(P)": BinStrategy(
            "pava_bc", nmin_frac=nmin_frac, nmax_frac=nmax_frac, n_min=n_min, n_max=n_max
        ),
        "TCE(Q)": BinStrategy("quantile", num_bins=num_bins),
        "TCE(V)": BinStrategy("pava"),
    }
    out = {}
    for label, strategy in strategies.items():
        bins = build_bins(dataset, strategy)
        report = tce(dataset, bins, cfg, norm=norm, name=label)
        out[label] = replace(report, config={**report.config, "bins": strategy.kind})
    return out


def tce_classwise(
    probabilities: np.ndarray,
    labels: np.ndarray,
    cfg: TestConfig = TestConfig(),
    strategy: BinStrategy = BinStrategy(),
    norm: str = "weighted_l1",
) -> float:
    """One-vs-rest extension to multi-class: the mean of the binary metric
    over classes, with bins rebuilt per class under the given strategy.

    ``probabilities`` is an (N, K) row-stochastic matrix and ``labels`` holds
    class indices 0..K-1 aligned with its columns.
    """
    probs = np.asarray(probabilities, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.ndim != 2 or probs.shape[1] < 2:
        raise ValueError("probabilities must be an (N, K) matrix with K >= 2")
    if np.any(np.abs(probs.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("probability rows must sum to 1 within 1e-9")
    if np.any(probs < 0.0) or np.any(probs > 1.0):
        raise ValueError("probabilities must lie in [0, 1]")
    k = probs.shape[1]
    if np.any((labels < 0) | (labels >= k)):
        raise ValueError("labels must be class indices in [0, K)")
    values = []
    for c in range(k):
        binary = Dataset(probs[:, c], (labels == c).astype(np.int64))
        bins = build_bins(binary, strategy)
        values.append(tce(binary, bins, cfg, norm=norm).value)
    return float(np.mean(values))
