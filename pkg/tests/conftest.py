"""Pytest fixtures for floodlib tests."""

import json

import numpy as np
import pytest

from floodlib.data.dataset import Dataset, Task
from floodlib.models.config import TrainConfig
from floodlib.paths import ExperimentPaths


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def separable_dataset():
    """Two well-separated 2-D clusters, 20 samples per class."""
    gen = np.random.default_rng(7)
    x0 = gen.normal(loc=(-2.0, -2.0), scale=0.3, size=(20, 2))
    x1 = gen.normal(loc=(2.0, 2.0), scale=0.3, size=(20, 2))
    features = np.vstack([x0, x1])
    labels = np.array([0] * 20 + [1] * 20)
    return Dataset.build(features, labels, Task.classification(2))


@pytest.fixture
def regression_dataset():
    """Linear target with small noise, 60 samples in 3-D."""
    gen = np.random.default_rng(11)
    x = gen.normal(size=(60, 3))
    y = x @ np.array([0.5, -1.0, 0.25]) + 0.05 * gen.normal(size=60)
    return Dataset.build(x, y, Task.regression())


@pytest.fixture
def tiny_train_cfg():
    """Short, deterministic training run."""
    return TrainConfig(epochs=30, batch_size=8, lr0=0.1, lr_decay=1.0, lr_step_epochs=100, l2_weight=0.0, seed=0)


@pytest.fixture
def experiment_paths(tmp_path):
    """ExperimentPaths under a temporary output directory, directories created."""
    paths = ExperimentPaths(tmp_path / "runs", "exp")
    paths.ensure()
    return paths


@pytest.fixture
def write_config(tmp_path):
    """Write an experiment config dict to JSON and return its path."""

    def _write(data: dict, name: str = "config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    return _write


@pytest.fixture
def small_toy_config(tmp_path):
    """A fast toy-Gaussian experiment with every flood variant."""
    return {
        "name": "small",
        "out_dir": str(tmp_path / "runs"),
        "dataset": {
            "kind": "toy_gaussian",
            "toy_gaussian": {"num_classes": 3, "dim": 4, "n_samples": 90, "seed": 0},
            "n_test": 60,
        },
        "model": {"hidden_dims": [8]},
        "train": {"epochs": 3, "batch_size": 16, "lr0": 0.1, "lr_step_epochs": 2},
        "methods": [
            {"name": "unregularized"},
            {"name": "flood", "flood": {"variant": "flood", "b": 0.1}},
            {"name": "iflood", "flood": {"variant": "iflood"}, "grid": [0.05, 0.2]},
            {"name": "adaflood", "flood": {"variant": "adaflood", "gamma": 0.5}},
        ],
        "aux": {
            "n_folds": 3,
            "gamma": 0.5,
            "aux_train_cfg": {"epochs": 3, "batch_size": 16, "lr0": 0.1},
        },
        "seeds": [0, 1],
    }
