"""Mini-batch SGD training with step LR decay, L2, early stopping and last-layer fine-tuning."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Protocol

import numpy as np

from ..data.dataset import Dataset
from ..errors import ConfigError, NumericError, TrainingDivergedError
from ..models.config import TrainConfig
from ..models.results import EpochRecord, TrainLog
from ..seeding import make_rng
from .mlp import Gradients, MlpModel, hidden_features, init_layer, loss_and_backward, per_sample_loss

logger = logging.getLogger(__name__)


class Objective(Protocol):
    def __call__(self, losses: np.ndarray, sample_ids: np.ndarray) -> tuple[float, np.ndarray]: ...


def mean_objective(losses: np.ndarray, sample_ids: np.ndarray) -> tuple[float, np.ndarray]:
    """Plain mean loss."""
    n = losses.size
    if n == 0:
        raise ConfigError("empty batch")
    return float(np.mean(losses)), np.full(n, 1.0 / n)


@dataclass(frozen=True)
class LayerMask:
    """Layers to re-initialize and train; must be a non-empty suffix of the layer list."""

    flags: tuple[bool, ...]

    def __post_init__(self) -> None:
        if not any(self.flags):
            raise ConfigError("layer mask covers no layers")
        first = self.flags.index(True)
        if not all(self.flags[first:]):
            raise ConfigError(f"masked layers must form a suffix of the layer list: {self.flags}")

    @classmethod
    def last(cls, num_layers: int, count: int) -> "LayerMask":
        if not 1 <= count <= num_layers:
            raise ConfigError(f"cannot mask the last {count} of {num_layers} layers")
        return cls(tuple(i >= num_layers - count for i in range(num_layers)))

    @property
    def first_trainable(self) -> int:
        return self.flags.index(True)


@dataclass
class TrainOutcome:
    model: MlpModel
    log: TrainLog


def mean_loss(model: MlpModel, dataset: Dataset) -> float:
    return float(np.mean(per_sample_loss(model, dataset.features, dataset.labels)))


def _sgd_step(model: MlpModel, grads: Gradients, lr: float) -> None:
    for layer in range(model.num_layers):
        model.weights[layer] -= lr * grads.weights[layer]
        model.biases[layer] -= lr * grads.biases[layer]


def _params_finite(model: MlpModel) -> bool:
    return all(np.all(np.isfinite(w)) and np.all(np.isfinite(b)) for w, b in zip(model.weights, model.biases))


def train(
    model: MlpModel,
    dataset: Dataset,
    train_cfg: TrainConfig,
    objective: Optional[Objective] = None,
    val_set: Optional[Dataset] = None,
    *,
    track: Optional[Dataset] = None,
) -> TrainOutcome:
    """Train a copy of ``model`` on ``dataset``.

    The returned model holds the parameters of the best validation epoch
    (plain loss) when early stopping is enabled, otherwise the final epoch.

    Raises:
        ConfigError: empty dataset
        TrainingDivergedError: non-finite objective or parameters; carries the log
    """
    if len(dataset) == 0:
        raise ConfigError("cannot train on an empty dataset")
    objective = objective or mean_objective
    model = model.copy()
    rng = make_rng(train_cfg.seed, 1)
    log = TrainLog()

    has_val = val_set is not None and len(val_set) > 0
    use_early_stop = train_cfg.early_stop_patience > 0 and has_val
    if train_cfg.early_stop_patience > 0 and not has_val:
        logger.warning("early stopping requested but no validation data; training all epochs")

    best_loss = math.inf
    best_model: Optional[MlpModel] = None
    best_epoch: Optional[int] = None
    waited = 0
    tracked: list[list[float]] = []
    n = len(dataset)

    for epoch in range(train_cfg.epochs):
        lr = train_cfg.lr_at(epoch)
        order = rng.permutation(n)
        objective_sum = 0.0

        with np.errstate(over="ignore", invalid="ignore"):
            for start in range(0, n, train_cfg.batch_size):
                idx = order[start:start + train_cfg.batch_size]
                ids = dataset.sample_ids[idx]
                try:
                    _, value, _, grads = loss_and_backward(
                        model,
                        dataset.features[idx],
                        dataset.labels[idx],
                        lambda losses: objective(losses, ids),
                        l2_weight=train_cfg.l2_weight,
                    )
                except NumericError as e:
                    _fail(log, epoch, f"non-finite values at epoch {epoch}: {e}")
                if not math.isfinite(value):
                    _fail(log, epoch, f"non-finite training objective at epoch {epoch}")
                objective_sum += value * idx.size
                _sgd_step(model, grads, lr)

            if not _params_finite(model):
                _fail(log, epoch, f"non-finite parameters after epoch {epoch}")
            train_loss = mean_loss(model, dataset)
            val_loss = mean_loss(model, val_set) if has_val else None

        if not math.isfinite(train_loss):
            _fail(log, epoch, f"non-finite training loss at epoch {epoch}")

        log.epochs.append(
            EpochRecord(
                epoch=epoch,
                lr=lr,
                train_objective=objective_sum / n,
                train_loss=train_loss,
                val_loss=val_loss,
            )
        )
        logger.debug("epoch %d lr=%.5g objective=%.6f loss=%.6f val=%s", epoch, lr, objective_sum / n, train_loss, val_loss)

        if track is not None:
            tracked.append(per_sample_loss(model, track.features, track.labels).tolist())

        if use_early_stop:
            if val_loss < best_loss:
                best_loss, best_model, best_epoch, waited = val_loss, model.copy(), epoch, 0
            else:
                waited += 1
                if waited >= train_cfg.early_stop_patience:
                    log.stopped_early = True
                    logger.debug("early stop at epoch %d (best %d)", epoch, best_epoch)
                    break

    if use_early_stop and best_model is not None:
        model = best_model
        log.best_epoch = best_epoch
    elif log.epochs:
        log.best_epoch = log.epochs[-1].epoch

    if track is not None:
        log.tracked_losses = tracked
        log.tracked_ids = [int(i) for i in track.sample_ids]
    return TrainOutcome(model=model, log=log)


def _fail(log: TrainLog, epoch: int, message: str) -> None:
    log.failed = True
    log.failure = message
    logger.error(message)
    raise TrainingDivergedError(message, epoch=epoch, log=log)


def reinit_and_finetune(
    base: MlpModel,
    mask: LayerMask,
    dataset: Dataset,
    train_cfg: TrainConfig,
    val_set: Optional[Dataset] = None,
    objective: Optional[Objective] = None,
) -> TrainOutcome:
    """Re-initialize the masked suffix of ``base`` and train only that suffix.

    The frozen prefix is evaluated once to produce features for the suffix,
    so fine-tuning steps cost only the suffix's forward/backward.
    """
    if len(mask.flags) != base.num_layers:
        raise ConfigError(f"mask has {len(mask.flags)} flags for a {base.num_layers}-layer model")
    first = mask.first_trainable
    rng = make_rng(train_cfg.seed, 2)

    weights = [w.copy() for w in base.weights]
    biases = [b.copy() for b in base.biases]
    for layer in range(first, base.num_layers):
        weights[layer], biases[layer] = init_layer(base.layer_dims[layer], base.layer_dims[layer + 1], rng)

    suffix = MlpModel(
        layer_dims=list(base.layer_dims[first:]),
        weights=weights[first:],
        biases=biases[first:],
        head=base.head,
        seed=train_cfg.seed,
    )

    def lift(ds: Optional[Dataset]) -> Optional[Dataset]:
        if ds is None or first == 0 or len(ds) == 0:
            return ds
        return replace(ds, features=hidden_features(base, ds.features, first), feature_names=None)

    outcome = train(suffix, lift(dataset), train_cfg, objective, lift(val_set))

    model = MlpModel(
        layer_dims=list(base.layer_dims),
        weights=weights[:first] + outcome.model.weights,
        biases=biases[:first] + outcome.model.biases,
        head=base.head,
        seed=train_cfg.seed,
    )
    return TrainOutcome(model=model, log=outcome.log)
