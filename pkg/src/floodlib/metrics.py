"""Evaluation metrics: accuracy, regression errors, NLL, ECE and Spearman correlation."""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np
from scipy.stats import rankdata

from .errors import ConfigError, ShapeError, UndefinedMetricError
from .models.results import CalibrationReport

logger = logging.getLogger(__name__)

PROB_CLAMP = 1e-12


class RegressionMetrics(NamedTuple):
    mse: float
    mae: float
    r2: float


def _probabilities(preds: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(preds, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64).reshape(-1)
    if p.ndim != 2 or p.shape[0] != y.size:
        raise ShapeError(f"expected an N x K probability matrix for {y.size} labels, got shape {p.shape}")
    if y.size and (y.min() < 0 or y.max() >= p.shape[1]):
        raise ShapeError(f"labels must lie in [0, {p.shape[1]})")
    return p, y


def accuracy(preds: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of rows whose argmax equals the label; ties go to the lowest class index."""
    p, y = _probabilities(preds, labels)
    if y.size == 0:
        raise UndefinedMetricError("accuracy of an empty set")
    # np.argmax returns the first maximal index
    return float(np.mean(np.argmax(p, axis=1) == y))


def nll(preds: np.ndarray, labels: np.ndarray) -> float:
    p, y = _probabilities(preds, labels)
    if y.size == 0:
        raise UndefinedMetricError("NLL of an empty set")
    p_true = np.clip(p[np.arange(y.size), y], PROB_CLAMP, 1.0)
    return float(np.mean(-np.log(p_true))) + 0.0


def regression_metrics(preds: np.ndarray, targets: np.ndarray) -> RegressionMetrics:
    """MSE, MAE and R^2 (SS_tot about the target mean).

    Raises:
        UndefinedMetricError: fewer than 2 targets or constant targets
    """
    p = np.asarray(preds, dtype=np.float64).reshape(-1)
    t = np.asarray(targets, dtype=np.float64).reshape(-1)
    if p.size != t.size:
        raise ShapeError(f"{p.size} predictions for {t.size} targets")
    if t.size < 2:
        raise UndefinedMetricError("R^2 needs at least 2 targets")
    residual = p - t
    ss_tot = float(np.sum((t - t.mean()) ** 2))
    if ss_tot == 0.0:
        raise UndefinedMetricError("R^2 is undefined for constant targets")
    ss_res = float(np.sum(residual ** 2))
    return RegressionMetrics(
        mse=float(np.mean(residual ** 2)),
        mae=float(np.mean(np.abs(residual))),
        r2=1.0 - ss_res / ss_tot,
    )


def ece(preds: np.ndarray, labels: np.ndarray, bins: int = 10) -> CalibrationReport:
    """Expected calibration error over ``bins`` uniform confidence bins.

    Confidence is the max probability of a row. Bins are left-closed and
    right-open except the last, which also holds confidence 1.0. Empty bins
    report 0 confidence and accuracy and contribute nothing.
    """
    if bins < 1:
        raise ConfigError(f"bins must be >= 1, got {bins}")
    p, y = _probabilities(preds, labels)
    n = y.size
    edges = np.linspace(0.0, 1.0, bins + 1)
    confidence = p.max(axis=1) if n else np.zeros(0)
    correct = (np.argmax(p, axis=1) == y).astype(np.float64) if n else np.zeros(0)
    which = np.clip(np.searchsorted(edges, confidence, side="right") - 1, 0, bins - 1)

    counts = np.bincount(which, minlength=bins)
    conf_sum = np.bincount(which, weights=confidence, minlength=bins)
    acc_sum = np.bincount(which, weights=correct, minlength=bins)
    nonempty = counts > 0
    mean_conf = np.zeros(bins)
    mean_acc = np.zeros(bins)
    mean_conf[nonempty] = conf_sum[nonempty] / counts[nonempty]
    mean_acc[nonempty] = acc_sum[nonempty] / counts[nonempty]

    value = float(np.sum(counts / n * np.abs(mean_acc - mean_conf))) if n else 0.0
    return CalibrationReport(
        bin_edges=[float(e) for e in edges],
        counts=[int(c) for c in counts],
        mean_confidence=[float(c) for c in mean_conf],
        mean_accuracy=[float(a) for a in mean_acc],
        ece=value,
        n=int(n),
    )


def spearman(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation of average-tie ranks.

    Raises:
        UndefinedMetricError: zero rank variance in either argument
    """
    a = np.asarray(x, dtype=np.float64).reshape(-1)
    b = np.asarray(y, dtype=np.float64).reshape(-1)
    if a.size != b.size:
        raise ShapeError(f"spearman needs equal lengths, got {a.size} and {b.size}")
    if a.size < 2:
        raise UndefinedMetricError("spearman needs at least 2 points")
    ra = rankdata(a, method="average")
    rb = rankdata(b, method="average")
    ra -= ra.mean()
    rb -= rb.mean()
    denom = float(np.sqrt(np.sum(ra * ra) * np.sum(rb * rb)))
    if denom == 0.0:
        raise UndefinedMetricError("spearman is undefined when ranks have zero variance")
    return float(np.clip(np.sum(ra * rb) / denom, -1.0, 1.0))


def classification_metrics(preds: np.ndarray, labels: np.ndarray, names: list[str], bins: int = 10) -> dict[str, float]:
    """Selected classification metrics as a flat dict."""
    out: dict[str, float] = {}
    for name in names:
        if name == "accuracy":
            out[name] = accuracy(preds, labels)
        elif name == "nll":
            out[name] = nll(preds, labels)
        elif name == "ece":
            out[name] = ece(preds, labels, bins).ece
        else:
            raise ConfigError(f"metric {name!r} does not apply to classification")
    return out


def regression_metric_dict(preds: np.ndarray, targets: np.ndarray, names: list[str]) -> dict[str, float]:
    """Selected regression metrics as a flat dict.

    MSE and MAE are defined for any non-empty set. R^2 is computed only when
    requested and left out, with a warning, where it is undefined (a single
    target or constant targets).
    """
    unknown = [n for n in names if n not in RegressionMetrics._fields]
    if unknown:
        raise ConfigError(f"metrics {unknown} do not apply to regression")
    p = np.asarray(preds, dtype=np.float64).reshape(-1)
    t = np.asarray(targets, dtype=np.float64).reshape(-1)
    if p.size != t.size:
        raise ShapeError(f"{p.size} predictions for {t.size} targets")
    if t.size == 0:
        raise UndefinedMetricError("regression metrics of an empty set")
    residual = p - t
    out: dict[str, float] = {}
    for name in names:
        if name == "mse":
            out[name] = float(np.mean(residual ** 2))
        elif name == "mae":
            out[name] = float(np.mean(np.abs(residual)))
        else:
            try:
                out[name] = regression_metrics(p, t).r2
            except UndefinedMetricError as e:
                logger.warning("r2 omitted: %s", e)
    return out
