"""Correction functions mixing auxiliary predictions with labels before scoring.

gamma = 0 trusts the auxiliary model fully; gamma = 1 yields theta = 0
(flooding disabled).
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ConfigError, DegenerateProbabilityError, NumericError


def _check_gamma(gamma: float) -> None:
    if not 0.0 <= gamma <= 1.0:
        raise ConfigError(f"gamma must lie in [0, 1], got {gamma}")


def correct_regression(aux_pred: float, label: float, gamma: float) -> float:
    _check_gamma(gamma)
    if not (math.isfinite(aux_pred) and math.isfinite(label)):
        raise NumericError("regression correction needs finite prediction and label")
    return (1.0 - gamma) * aux_pred + gamma * label


def theta_regression(aux_pred: float, label: float, gamma: float) -> float:
    """Squared error of the corrected prediction: (1 - gamma)^2 (aux_pred - label)^2."""
    corrected = correct_regression(aux_pred, label, gamma)
    return (corrected - label) ** 2


def correct_classification(aux_probs: np.ndarray, label: int, gamma: float) -> float:
    """theta = -log((1 - gamma) * p_true + gamma)."""
    probs = np.asarray(aux_probs, dtype=np.float64).reshape(1, -1)
    return float(theta_classification_batch(probs, np.array([label]), gamma)[0])


def theta_regression_batch(aux_preds: np.ndarray, labels: np.ndarray, gamma: float) -> np.ndarray:
    _check_gamma(gamma)
    preds = np.asarray(aux_preds, dtype=np.float64).reshape(-1)
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if not (np.all(np.isfinite(preds)) and np.all(np.isfinite(y))):
        raise NumericError("regression correction needs finite predictions and labels")
    corrected = (1.0 - gamma) * preds + gamma * y
    return (corrected - y) ** 2


def theta_classification_batch(aux_probs: np.ndarray, labels: np.ndarray, gamma: float) -> np.ndarray:
    """Vectorized classification correction over rows of probabilities.

    Raises:
        DegenerateProbabilityError: p_true == 0 with gamma == 0
    """
    _check_gamma(gamma)
    probs = np.asarray(aux_probs, dtype=np.float64)
    idx = np.asarray(labels, dtype=np.int64).reshape(-1)
    p_true = probs[np.arange(idx.size), idx]
    if np.any((p_true < 0) | (p_true > 1)) or not np.all(np.isfinite(p_true)):
        raise NumericError("auxiliary probabilities must lie in [0, 1]")
    corrected = (1.0 - gamma) * p_true + gamma
    if np.any(corrected <= 0.0):
        raise DegenerateProbabilityError(
            "auxiliary model assigns probability 0 to the true class with gamma = 0; use gamma > 0"
        )
    # + 0.0 turns -0.0 (from -log(1)) into 0.0
    return -np.log(np.minimum(corrected, 1.0)) + 0.0
