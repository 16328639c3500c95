"""K-fold partitioning of a training set by sample ID."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data.dataset import Dataset
from ..errors import ConfigError
from ..seeding import make_rng


@dataclass(frozen=True)
class FoldAssignment:
    """Sample ID -> fold index in [0, n_folds). Arrays are sorted by sample ID."""

    sample_ids: np.ndarray
    fold_of: np.ndarray
    n_folds: int

    def fold_ids(self, fold: int) -> np.ndarray:
        if not 0 <= fold < self.n_folds:
            raise ConfigError(f"fold {fold} out of range for {self.n_folds} folds")
        return self.sample_ids[self.fold_of == fold]

    def sizes(self) -> list[int]:
        return [int(c) for c in np.bincount(self.fold_of, minlength=self.n_folds)]

    def as_dict(self) -> dict[int, int]:
        return {int(i): int(f) for i, f in zip(self.sample_ids, self.fold_of)}


def _dealing_order(dataset: Dataset, rng: np.random.Generator) -> np.ndarray:
    """Classes one after another, each shuffled; regression gets a plain permutation."""
    if not dataset.task.is_classification:
        return rng.permutation(len(dataset))
    parts = [rng.permutation(np.flatnonzero(dataset.labels == k)) for k in range(dataset.task.num_classes)]
    return np.concatenate(parts)


def make_folds(dataset: Dataset, n: int, seed: int) -> FoldAssignment:
    """Balanced partition into ``n`` folds, stratified by class for classification.

    Samples are dealt to folds round-robin in class-grouped random order, so
    fold sizes differ by at most one overall and within every class.
    """
    if n < 2:
        raise ConfigError(f"need at least 2 folds, got {n}")
    if n > len(dataset):
        raise ConfigError(f"cannot make {n} folds from {len(dataset)} samples")
    order = _dealing_order(dataset, make_rng(seed, 40))
    fold_of = np.empty(len(dataset), dtype=np.int64)
    fold_of[order] = np.arange(len(dataset)) % n

    by_id = np.argsort(dataset.sample_ids, kind="stable")
    return FoldAssignment(sample_ids=dataset.sample_ids[by_id].copy(), fold_of=fold_of[by_id], n_folds=n)
