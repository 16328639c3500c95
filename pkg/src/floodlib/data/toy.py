"""Synthetic datasets: the three-type Gaussian mixture and a smooth regression task."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..models.config import ToyGaussianConfig, ToyRegressionConfig
from ..seeding import make_rng
from .dataset import Dataset, Task


@dataclass(frozen=True)
class ToyGaussianPair:
    """Datasets A and B drawn independently around the same class means."""

    a: Dataset
    b: Dataset
    means: np.ndarray


def class_means(cfg: ToyGaussianConfig) -> np.ndarray:
    """K x d means with entries drawn from {-delta_mu, 0, +delta_mu}."""
    if cfg.num_classes < 2:
        raise ConfigError("toy Gaussian needs at least 2 classes")
    rng = make_rng(cfg.seed, 10)
    choices = np.array([-cfg.delta_mu, 0.0, cfg.delta_mu])
    return rng.choice(choices, size=(cfg.num_classes, cfg.dim))


def sample_toy_gaussian(
    cfg: ToyGaussianConfig,
    means: np.ndarray,
    n: int,
    rng: np.random.Generator,
    *,
    id_offset: int = 0,
    clean: bool = False,
) -> Dataset:
    """Draw ``n`` samples; ``clean`` folds the mislabeled share into regular samples.

    Per generating class with n_k members, floor(frac * n_k) samples are
    mislabeled and floor(frac * n_k) irregular; the rest are regular.
    Mislabeled samples keep a small sigma but take a uniformly drawn other class.
    """
    k = cfg.num_classes
    generating = rng.integers(0, k, size=n)
    types = np.full(n, "regular", dtype=object)
    for cls in range(k):
        members = rng.permutation(np.flatnonzero(generating == cls))
        n_mis = 0 if clean else int(np.floor(cfg.frac_mislabeled * members.size))
        n_irr = int(np.floor(cfg.frac_irregular * members.size))
        types[members[:n_mis]] = "mislabeled"
        types[members[n_mis:n_mis + n_irr]] = "irregular"

    sigma = np.where(types == "irregular", cfg.sigma_irregular, cfg.sigma_regular)
    features = means[generating] + sigma[:, None] * rng.standard_normal((n, cfg.dim))

    labels = generating.copy()
    mislabeled = types == "mislabeled"
    shift = rng.integers(1, k, size=n)
    labels[mislabeled] = (generating[mislabeled] + shift[mislabeled]) % k

    return Dataset.build(
        features,
        labels,
        Task.classification(k),
        sample_ids=np.arange(id_offset, id_offset + n),
        noise_flags=mislabeled,
        feature_names=tuple(f"x{i}" for i in range(cfg.dim)),
        sample_types=types.astype(str),
    )


def gen_toy_gaussian(cfg: ToyGaussianConfig) -> ToyGaussianPair:
    """Generate datasets A (IDs 0..N-1) and B (IDs N..2N-1) sharing class means."""
    means = class_means(cfg)
    a = sample_toy_gaussian(cfg, means, cfg.n_samples, make_rng(cfg.seed, 11), id_offset=0)
    b = sample_toy_gaussian(cfg, means, cfg.n_samples, make_rng(cfg.seed, 12), id_offset=cfg.n_samples)
    return ToyGaussianPair(a=a, b=b, means=means)


def gen_toy_gaussian_test(cfg: ToyGaussianConfig, means: np.ndarray, n: int) -> Dataset:
    """Clean held-out test set (no mislabeled samples) with IDs after A and B."""
    return sample_toy_gaussian(cfg, means, n, make_rng(cfg.seed, 13), id_offset=2 * cfg.n_samples, clean=True)


def _regression_target(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    return x @ w + np.sin(2.0 * x[:, 0])


def gen_toy_regression(cfg: ToyRegressionConfig, *, n: int | None = None, stream: int = 0, id_offset: int = 0) -> Dataset:
    """Gaussian features, target = w.x + sin(2 x_0) + N(0, noise_std^2).

    ``stream`` selects an independent draw sharing the same ``w``.
    """
    w = make_rng(cfg.seed, 20).standard_normal(cfg.dim) / np.sqrt(cfg.dim)
    rng = make_rng(cfg.seed, 21, stream)
    count = cfg.n_samples if n is None else n
    x = rng.standard_normal((count, cfg.dim))
    y = _regression_target(x, w) + cfg.noise_std * rng.standard_normal(count)
    return Dataset.build(
        x,
        y,
        Task.regression(),
        sample_ids=np.arange(id_offset, id_offset + count),
        feature_names=tuple(f"x{i}" for i in range(cfg.dim)),
    )
