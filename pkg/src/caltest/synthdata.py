"""Synthetic binary classification data from a two-Gaussian generative model.

Labels are Bernoulli with a configurable prevalence and the scalar feature is
Gaussian with a class-dependent mean, so the exact posterior P(y=1 | x) is
available in closed form (it is logistic in x). That makes it possible to
construct test sets where a fitted model is well-calibrated or miscalibrated
by design, simply by shifting the prevalence between training and test data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GdaConfig",
    "sample",
    "true_posterior",
    "logistic_curve",
    "perturb_logit_normal",
    "fit_logistic",
    "predict_logistic",
]

_CLAMP = 1e-12


@dataclass(frozen=True)
class GdaConfig:
    """Generative model: y ~ Bernoulli(prevalence), x | y ~ Normal(mean_y, scale).

    ``scale`` is a standard deviation. Defaults put the class means at -1 and
    +1 with scale 2.
    """

    prevalence: float
    mean_neg: float = -1.0
    mean_pos: float = 1.0
    scale: float = 2.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 <= self.prevalence <= 1.0):
            raise ValueError("prevalence must lie in [0, 1]")
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")


def _rng(seed: int) -> np.random.Generator:
    # Philox is counter-based, so streams are reproducible across platforms.
    return np.random.Generator(np.random.Philox(key=seed))


def sample(cfg: GdaConfig, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Draw n (x, y) pairs; identical output for identical (cfg, n)."""
    if n < 1:
        raise ValueError("need at least one sample")
    rng = _rng(cfg.seed)
    y = (rng.random(n) < cfg.prevalence).astype(np.int64)
    x = np.where(y == 1, cfg.mean_pos, cfg.mean_neg) + cfg.scale * rng.standard_normal(n)
    return x, y


def true_posterior(cfg: GdaConfig, x) -> np.ndarray:
    """Exact P(y=1 | x) of the generative model.

    The log-odds are linear in x:
        log(prev / (1 - prev)) + (m1 - m0) * x / s^2 + (m0^2 - m1^2) / (2 s^2).
    With the default means and scale this reduces to log-odds + x / 2.
    """
    x = np.asarray(x, dtype=np.float64)
    if cfg.prevalence == 0.0:
        return np.zeros_like(x)
    if cfg.prevalence == 1.0:
        return np.ones_like(x)
    s2 = cfg.scale**2
    intercept = math.log(cfg.prevalence / (1.0 - cfg.prevalence)) + (
        cfg.mean_neg**2 - cfg.mean_pos**2
    ) / (2.0 * s2)
    slope = (cfg.mean_pos - cfg.mean_neg) / s2
    return _sigmoid(intercept + slope * x)


def logistic_curve(x, beta0: float, beta1: float) -> np.ndarray:
    """The curve 1 / (1 + exp(beta0 + beta1 * x)), kept alongside
    :func:`true_posterior` so alternative parameterizations can be compared."""
    x = np.asarray(x, dtype=np.float64)
    return 1.0 / (1.0 + np.exp(beta0 + beta1 * x))


def perturb_logit_normal(preds, sigma: float, seed: int = 0) -> np.ndarray:
    """Noise each prediction on the logit scale with a Normal(0, sigma) draw.

    Inputs are clamped away from 0 and 1 before the logit; sigma = 0 returns
    the clamped input unchanged.
    """
    preds = np.asarray(preds, dtype=np.float64)
    if sigma < 0.0:
        raise ValueError("sigma must be non-negative")
    clamped = np.clip(preds, _CLAMP, 1.0 - _CLAMP)
    if sigma == 0.0:
        return clamped
    z = np.log(clamped) - np.log1p(-clamped)
    z = z + sigma * _rng(seed).standard_normal(preds.shape)
    return _sigmoid(z)


def _sigmoid(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    t = np.exp(-np.abs(z))
    return np.where(z >= 0, 1.0 / (1.0 + t), t / (1.0 + t))


def fit_logistic(
    x: np.ndarray,
    y: np.ndarray,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> tuple[float, float]:
    """Maximum-likelihood fit of p = sigmoid(b0 + b1 x) by damped Newton steps.

    Iterates until the gradient norm drops below tol or max_iter is hit; each
    Newton step is halved while it fails to improve the log-likelihood.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)

    def loglik(b0, b1):
        eta = b0 + b1 * x
        return float(np.sum(y * eta - np.logaddexp(0.0, eta)))

    b0, b1 = 0.0, 0.0
    current = loglik(b0, b1)
    for _ in range(max_iter):
        eta = b0 + b1 * x
        p = _sigmoid(eta)
        resid = y - p
        grad = np.array([resid.sum(), (resid * x).sum()])
        if math.hypot(grad[0], grad[1]) < tol:
            break
        w = p * (1.0 - p)
        h00 = w.sum()
        h01 = (w * x).sum()
        h11 = (w * x * x).sum()
        det = h00 * h11 - h01 * h01
        if det <= 0.0:
            break
        step0 = (h11 * grad[0] - h01 * grad[1]) / det
        step1 = (h00 * grad[1] - h01 * grad[0]) / det
        scale = 1.0
        for _ in range(30):
            cand = loglik(b0 + scale * step0, b1 + scale * step1)
            if cand >= current:
                break
            scale *= 0.5
        b0 += scale * step0
        b1 += scale * step1
        current = loglik(b0, b1)
    return float(b0), float(b1)


def predict_logistic(x, b0: float, b1: float) -> np.ndarray:
    """Predicted probabilities sigmoid(b0 + b1 x)."""
    return _sigmoid(b0 + b1 * np.asarray(x, dtype=np.float64))
