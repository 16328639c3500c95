"""Flood objectives over a mini-batch of per-sample losses.

Every objective returns ``(value, upstream)`` where ``upstream[i]`` is
d(value)/d(loss_i). At the kink |.| the subgradient is 0 (np.sign(0) == 0),
so a sample sitting exactly at its flood level exerts no gradient.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

import numpy as np

from ..errors import ConfigError, NumericError, ShapeError
from ..models.config import FloodConfig
from .table import FloodTable


class ObjectiveValue(NamedTuple):
    value: float
    upstream: np.ndarray


def _check(losses: np.ndarray) -> np.ndarray:
    arr = np.asarray(losses, dtype=np.float64).reshape(-1)
    if arr.size == 0:
        raise ConfigError("empty batch")
    if not np.all(np.isfinite(arr)):
        raise NumericError("per-sample losses must be finite")
    return arr


def plain_objective(losses: np.ndarray) -> ObjectiveValue:
    arr = _check(losses)
    return ObjectiveValue(float(np.mean(arr)), np.full(arr.size, 1.0 / arr.size))


def flood_objective(losses: np.ndarray, b: float) -> ObjectiveValue:
    """|mean(l) - b| + b, flooding the batch mean."""
    arr = _check(losses)
    gap = float(np.mean(arr)) - b
    return ObjectiveValue(abs(gap) + b, np.full(arr.size, np.sign(gap) / arr.size))


def iflood_objective(losses: np.ndarray, b: float) -> ObjectiveValue:
    """mean(|l_i - b| + b), flooding each sample at the same level."""
    arr = _check(losses)
    gap = arr - b
    return ObjectiveValue(float(np.mean(np.abs(gap) + b)), np.sign(gap) / arr.size)


def adaflood_objective(losses: np.ndarray, theta: np.ndarray) -> ObjectiveValue:
    """mean(|l_i - theta_i| + theta_i), flooding each sample at its own level."""
    arr = _check(losses)
    th = np.asarray(theta, dtype=np.float64).reshape(-1)
    if th.size != arr.size:
        raise ShapeError(f"{th.size} flood levels for a batch of {arr.size}")
    gap = arr - th
    return ObjectiveValue(float(np.mean(np.abs(gap) + th)), np.sign(gap) / arr.size)


class FloodObjective:
    """Objective handle used by ``nn.train``: maps (losses, sample IDs) to value and upstream."""

    def __init__(self, config: FloodConfig, table: Optional[FloodTable] = None):
        if config.variant == "adaflood" and table is None:
            raise ConfigError("adaflood needs a flood table")
        self.config = config
        self.table = table

    def __call__(self, losses: np.ndarray, sample_ids: np.ndarray) -> ObjectiveValue:
        variant = self.config.variant
        if variant == "flood":
            return flood_objective(losses, self.config.b)
        if variant == "iflood":
            return iflood_objective(losses, self.config.b)
        if variant == "adaflood":
            return adaflood_objective(losses, self.table.lookup(sample_ids))
        return plain_objective(losses)

    def __repr__(self) -> str:
        return f"FloodObjective({self.config.variant}, b={self.config.b}, table={'yes' if self.table else 'no'})"
