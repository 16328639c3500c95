"""Indexed feature/label datasets and stratified train/validation splitting."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Literal, Optional, Sequence

import numpy as np

from ..errors import ConfigError, ShapeError, TaskMismatchError
from ..seeding import make_rng

logger = logging.getLogger(__name__)

SampleType = Literal["regular", "irregular", "mislabeled"]


@dataclass(frozen=True)
class Task:
    kind: Literal["classification", "regression"]
    num_classes: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind == "classification" and (self.num_classes is None or self.num_classes < 2):
            raise ConfigError("classification tasks need num_classes >= 2")
        if self.kind == "regression" and self.num_classes is not None:
            raise ConfigError("regression tasks have no num_classes")

    @property
    def is_classification(self) -> bool:
        return self.kind == "classification"

    @property
    def output_dim(self) -> int:
        return self.num_classes if self.is_classification else 1

    @property
    def head(self) -> str:
        return "softmax" if self.is_classification else "identity"

    @classmethod
    def classification(cls, num_classes: int) -> "Task":
        return cls("classification", num_classes)

    @classmethod
    def regression(cls) -> "Task":
        return cls("regression")


@dataclass(frozen=True)
class Dataset:
    """N x d features with labels, unique sample IDs and per-sample noise flags.

    ``sample_types`` is only set for generated toy data.
    """

    features: np.ndarray
    labels: np.ndarray
    sample_ids: np.ndarray
    task: Task
    noise_flags: np.ndarray
    feature_names: Optional[tuple[str, ...]] = None
    target_name: str = "target"
    sample_types: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        n = self.features.shape[0]
        if self.features.ndim != 2:
            raise ShapeError(f"features must be 2-D, got shape {self.features.shape}")
        if len(self.labels) != n or len(self.sample_ids) != n or len(self.noise_flags) != n:
            raise ShapeError("features, labels, sample_ids and noise_flags must have the same length")
        if len(np.unique(self.sample_ids)) != n:
            raise ConfigError("sample IDs must be unique")
        if self.task.is_classification and n:
            if np.any(self.labels < 0) or np.any(self.labels >= self.task.num_classes):
                raise ConfigError(f"classification labels must lie in [0, {self.task.num_classes})")
        if self.feature_names is not None and len(self.feature_names) != self.features.shape[1]:
            raise ShapeError("feature_names length must match the feature dimension")
        if self.sample_types is not None and len(self.sample_types) != n:
            raise ShapeError("sample_types length must match the number of samples")

    def __len__(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @classmethod
    def build(
        cls,
        features: np.ndarray,
        labels: Sequence,
        task: Task,
        *,
        sample_ids: Optional[Sequence[int]] = None,
        noise_flags: Optional[Sequence[bool]] = None,
        **kwargs,
    ) -> "Dataset":
        x = np.asarray(features, dtype=np.float64)
        n = x.shape[0]
        y = np.asarray(labels, dtype=np.int64 if task.is_classification else np.float64)
        ids = np.arange(n, dtype=np.int64) if sample_ids is None else np.asarray(sample_ids, dtype=np.int64)
        flags = np.zeros(n, dtype=bool) if noise_flags is None else np.asarray(noise_flags, dtype=bool)
        return cls(features=x, labels=y, sample_ids=ids, task=task, noise_flags=flags, **kwargs)

    def subset(self, indices: np.ndarray) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return replace(
            self,
            features=self.features[idx],
            labels=self.labels[idx],
            sample_ids=self.sample_ids[idx],
            noise_flags=self.noise_flags[idx],
            sample_types=None if self.sample_types is None else self.sample_types[idx],
        )

    def select_ids(self, ids: Sequence[int]) -> "Dataset":
        """Subset by sample ID, preserving the dataset's own order."""
        mask = np.isin(self.sample_ids, np.asarray(ids, dtype=np.int64))
        return self.subset(np.flatnonzero(mask))

    def exclude_ids(self, ids: Sequence[int]) -> "Dataset":
        mask = ~np.isin(self.sample_ids, np.asarray(ids, dtype=np.int64))
        return self.subset(np.flatnonzero(mask))

    def require_task(self, kind: str, operation: str) -> None:
        if self.task.kind != kind:
            raise TaskMismatchError(f"{operation} needs a {kind} dataset, got {self.task.kind}")


def stratified_order(dataset: Dataset, rng: np.random.Generator) -> np.ndarray:
    """Permutation in which every prefix holds each class in proportion.

    Each class is shuffled, and sample j of a class with n_k members is placed
    at fractional position (j + 0.5) / n_k; sorting by position interleaves
    classes. Regression datasets get a plain permutation.
    """
    n = len(dataset)
    if not dataset.task.is_classification:
        return rng.permutation(n)
    position = np.empty(n, dtype=np.float64)
    for k in range(dataset.task.num_classes):
        members = np.flatnonzero(dataset.labels == k)
        if members.size == 0:
            continue
        members = rng.permutation(members)
        position[members] = (np.arange(members.size) + 0.5) / members.size
    tiebreak = rng.permutation(n)
    return np.lexsort((tiebreak, position))


def split(dataset: Dataset, train_frac: float, seed: int) -> tuple[Dataset, Dataset]:
    """Disjoint (train, val) split of sizes floor(train_frac * N) and the remainder.

    Stratified by class for classification. An empty validation set is
    allowed but logged as a warning.
    """
    if not 0.0 < train_frac <= 1.0:
        raise ConfigError(f"train_frac must be in (0, 1], got {train_frac}")
    order = stratified_order(dataset, make_rng(seed, 3))
    n_train = int(np.floor(train_frac * len(dataset)))
    train_idx = np.sort(order[:n_train])
    val_idx = np.sort(order[n_train:])
    if val_idx.size == 0:
        logger.warning("validation split is empty (train_frac=%s)", train_frac)
    return dataset.subset(train_idx), dataset.subset(val_idx)


def concat(parts: Sequence[Dataset]) -> Dataset:
    if not parts:
        raise ConfigError("nothing to concatenate")
    first = parts[0]
    types = None
    if all(p.sample_types is not None for p in parts):
        types = np.concatenate([p.sample_types for p in parts])
    return replace(
        first,
        features=np.concatenate([p.features for p in parts]),
        labels=np.concatenate([p.labels for p in parts]),
        sample_ids=np.concatenate([p.sample_ids for p in parts]),
        noise_flags=np.concatenate([p.noise_flags for p in parts]),
        sample_types=types,
    )
