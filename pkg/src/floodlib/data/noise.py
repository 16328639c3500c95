"""Training-set corruption: uniform label flips and skew-normal target noise."""

from __future__ import annotations

import logging
from dataclasses import replace

import numpy as np

from ..errors import ConfigError
from ..seeding import make_rng
from .dataset import Dataset

logger = logging.getLogger(__name__)


def flip_labels(dataset: Dataset, alpha: float, seed: int) -> Dataset:
    """Flip floor(alpha * N / 100) uniformly chosen labels to a uniform other class."""
    dataset.require_task("classification", "flip_labels")
    if not 0.0 <= alpha <= 100.0:
        raise ConfigError(f"alpha must be a percentage in [0, 100], got {alpha}")
    n = len(dataset)
    n_flip = int(np.floor(alpha * n / 100.0))
    if n_flip == 0:
        return dataset

    k = dataset.task.num_classes
    rng = make_rng(seed, 30)
    chosen = rng.choice(n, size=n_flip, replace=False)
    labels = dataset.labels.copy()
    labels[chosen] = (labels[chosen] + rng.integers(1, k, size=n_flip)) % k
    flags = dataset.noise_flags.copy()
    flags[chosen] = True
    logger.info("flipped %d of %d labels", n_flip, n)
    return replace(dataset, labels=labels, noise_flags=flags)


def skew_normal_noise(n: int, skew: float, scale: float, rng: np.random.Generator) -> np.ndarray:
    """Skew-normal draws with shape ``skew``, location 0 and scale ``scale``.

    X = delta |Z0| + sqrt(1 - delta^2) Z1 with delta = skew / sqrt(1 + skew^2).
    """
    delta = skew / np.sqrt(1.0 + skew * skew)
    z0 = rng.standard_normal(n)
    z1 = rng.standard_normal(n)
    return scale * (delta * np.abs(z0) + np.sqrt(1.0 - delta * delta) * z1)


def add_skew_noise(dataset: Dataset, skew: float, scale: float, seed: int) -> Dataset:
    """Add skew-normal noise to every regression target."""
    dataset.require_task("regression", "add_skew_noise")
    if not 0.0 <= skew <= 3.0:
        raise ConfigError(f"skew must lie in [0, 3], got {skew}")
    if scale <= 0:
        raise ConfigError(f"scale must be positive, got {scale}")
    noise = skew_normal_noise(len(dataset), skew, scale, make_rng(seed, 31))
    return replace(
        dataset,
        labels=dataset.labels + noise,
        noise_flags=np.ones(len(dataset), dtype=bool),
    )
