"""Shared data model: prediction/label datasets, bins over [0, 1], and binned summaries."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["Dataset", "Bin", "BinSet", "BinnedData", "partition", "sorted_view"]


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Paired model predictions in [0, 1] and binary labels.

    Arrays are validated and made read-only on construction, so instances can
    be shared freely across threads. Out-of-range predictions are rejected
    rather than clamped; silent clamping would hide upstream bugs.
    """

    predictions: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        preds = np.ascontiguousarray(self.predictions, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels)
        if preds.ndim != 1 or labels.ndim != 1:
            raise ValueError("predictions and labels must be one-dimensional")
        if preds.shape[0] != labels.shape[0]:
            raise ValueError(
                f"length mismatch: {preds.shape[0]} predictions vs {labels.shape[0]} labels"
            )
        if preds.shape[0] == 0:
            raise ValueError("dataset must contain at least one record")
        if not np.all(np.isfinite(preds)):
            raise ValueError("predictions must be finite")
        if np.any(preds < 0.0) or np.any(preds > 1.0):
            raise ValueError("predictions must lie in [0, 1]")
        if not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be 0 or 1")
        object.__setattr__(self, "predictions", _frozen(preds))
        object.__setattr__(self, "labels", _frozen(labels.astype(np.int64)))

    @property
    def n(self) -> int:
        return int(self.predictions.shape[0])

    @property
    def prevalence(self) -> float:
        return float(self.labels.mean())


def sorted_view(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Labels and predictions co-sorted ascending by prediction, stable on ties."""
    order = np.argsort(dataset.predictions, kind="stable")
    return dataset.labels[order], dataset.predictions[order]


@dataclass(frozen=True)
class Bin:
    """One interval of prediction values: [lower, upper), or [lower, upper] when closed."""

    lower: float
    upper: float
    closed_upper: bool = False

    def __post_init__(self) -> None:
        if not (0.0 <= self.lower < self.upper <= 1.0):
            raise ValueError(f"invalid bin interval [{self.lower}, {self.upper}]")

    def contains(self, value: float) -> bool:
        if self.closed_upper:
            return self.lower <= value <= self.upper
        return self.lower <= value < self.upper

    def __str__(self) -> str:
        right = "]" if self.closed_upper else ")"
        return f"[{self.lower:.6g}, {self.upper:.6g}{right}"


@dataclass(frozen=True)
class BinSet:
    """Ordered, disjoint, contiguous bins whose union is exactly [0, 1].

    Every bin is half-open [L, R) except the last, which is closed [L, 1.0]
    so that a prediction of exactly 1 is assignable.
    """

    bins: tuple[Bin, ...]

    def __post_init__(self) -> None:
        bins = tuple(self.bins)
        if not bins:
            raise ValueError("a bin set needs at least one bin")
        if bins[0].lower != 0.0:
            raise ValueError("first bin must start at 0")
        if bins[-1].upper != 1.0 or not bins[-1].closed_upper:
            raise ValueError("last bin must be closed at 1")
        for left, right in zip(bins, bins[1:]):
            if left.closed_upper:
                raise ValueError("only the last bin may be closed")
            if left.upper != right.lower:
                raise ValueError("bins must be contiguous")
        object.__setattr__(self, "bins", bins)

    @classmethod
    def from_edges(cls, edges) -> "BinSet":
        """Build a bin set from a full strictly increasing edge list [0, ..., 1]."""
        e = [float(v) for v in edges]
        if len(e) < 2 or e[0] != 0.0 or e[-1] != 1.0:
            raise ValueError("edges must run from 0 to 1")
        if any(a >= b for a, b in zip(e, e[1:])):
            raise ValueError("edges must be strictly increasing")
        bins = [Bin(a, b) for a, b in zip(e[:-2], e[1:-1])]
        bins.append(Bin(e[-2], e[-1], closed_upper=True))
        return cls(tuple(bins))

    @property
    def edges(self) -> np.ndarray:
        return np.array([b.lower for b in self.bins] + [1.0])

    def __len__(self) -> int:
        return len(self.bins)

    def assign(self, predictions: np.ndarray) -> np.ndarray:
        """Bin index for each prediction; boundary values go to the right bin."""
        interior = self.edges[1:-1]
        return np.searchsorted(interior, predictions, side="right")


@dataclass(frozen=True)
class BinnedData:
    """Per-bin membership and summary statistics for one (dataset, bins) pair.

    Empty bins are retained with count 0 and NaN statistics; ``is_empty``
    flags them so callers can define their own handling.
    """

    dataset: Dataset
    bins: BinSet
    bin_index: np.ndarray
    counts: np.ndarray
    empirical_prob: np.ndarray
    mean_prediction: np.ndarray
    weights: np.ndarray
    members: tuple[np.ndarray, ...]

    @property
    def is_empty(self) -> np.ndarray:
        return self.counts == 0

    def labels_in(self, b: int) -> np.ndarray:
        return self.dataset.labels[self.members[b]]

    def predictions_in(self, b: int) -> np.ndarray:
        return self.dataset.predictions[self.members[b]]


def partition(dataset: Dataset, bins: BinSet) -> BinnedData:
    """Split a dataset into per-bin subsets with counts, label means, and prediction means.

    Every record lands in exactly one bin. The per-bin label mean is the
    estimated probability of the positive class for predictions in that bin.
    """
    idx = bins.assign(dataset.predictions)
    b = len(bins)
    counts = np.bincount(idx, minlength=b)
    label_sums = np.bincount(idx, weights=dataset.labels, minlength=b)
    pred_sums = np.bincount(idx, weights=dataset.predictions, minlength=b)
    with np.errstate(invalid="ignore", divide="ignore"):
        empirical = np.where(counts > 0, label_sums / np.maximum(counts, 1), np.nan)
        mean_pred = np.where(counts > 0, pred_sums / np.maximum(counts, 1), np.nan)
    weights = counts / dataset.n
    order = np.argsort(idx, kind="stable")
    splits = np.searchsorted(idx[order], np.arange(1, b))
    members = tuple(_frozen(m) for m in np.split(order, splits))
    return BinnedData(
        dataset=dataset,
        bins=bins,
        bin_index=_frozen(idx),
        counts=_frozen(counts),
        empirical_prob=_frozen(empirical),
        mean_prediction=_frozen(mean_pred),
        weights=_frozen(weights),
        members=members,
    )
