"""Auxiliary-model pipeline: fold training (scratch or fine-tune) and flood-level estimation."""

from __future__ import annotations

import hashlib
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..data.dataset import Dataset
from ..errors import PipelineError, TrainingDivergedError, ValidationError
from ..flood.correction import theta_classification_batch, theta_regression_batch
from ..flood.table import FloodTable, FloodTableProvenance, save_flood_table
from ..ledger import LedgerWriter
from ..metrics import spearman
from ..models.config import AuxConfig, TrainConfig
from ..models.results import TrainLog
from ..nn.checkpoint import dumps_checkpoint, load_checkpoint, save_checkpoint
from ..nn.mlp import MlpModel, forward, init_mlp
from ..nn.training import LayerMask, reinit_and_finetune, train
from ..parallel import ProgressCallback, run_ordered
from ..paths import AuxPaths
from ..seeding import derive_seed
from .folds import FoldAssignment, make_folds

logger = logging.getLogger(__name__)


@dataclass
class AuxModels:
    """Fold models aligned with fold indices, plus the fine-tune base when used."""

    models: list[MlpModel]
    logs: list[TrainLog]
    base: Optional[MlpModel] = None
    base_log: Optional[TrainLog] = None
    seconds: float = 0.0


@dataclass
class AuxRun:
    folds: FoldAssignment
    aux: AuxModels
    table: FloodTable
    checkpoint_hashes: list[str] = field(default_factory=list)


def layer_dims_for(dataset: Dataset, hidden_dims: Sequence[int]) -> list[int]:
    return [dataset.dim, *hidden_dims, dataset.task.output_dim]


def _fold_train_cfg(cfg: AuxConfig, fold: int) -> TrainConfig:
    return cfg.aux_train_cfg.model_copy(update={"seed": derive_seed(cfg.seed, 51, fold)})


def _finetune_cfg(cfg: AuxConfig, fold: int) -> TrainConfig:
    epochs = cfg.aux_train_cfg.epochs if cfg.finetune_epochs is None else cfg.finetune_epochs
    return cfg.aux_train_cfg.model_copy(
        update={
            "epochs": epochs,
            "early_stop_patience": cfg.finetune_patience,
            "seed": derive_seed(cfg.seed, 54, fold),
        }
    )


def train_aux_models(
    dataset: Dataset,
    folds: FoldAssignment,
    cfg: AuxConfig,
    *,
    hidden_dims: Sequence[int],
    val_set: Optional[Dataset] = None,
    workers: int = 1,
    on_progress: Optional[ProgressCallback] = None,
) -> AuxModels:
    """Train one auxiliary model per fold on the data outside that fold.

    Scratch mode trains every fold model from its own initialization.
    Fine-tune mode first trains a base model on the whole dataset, then for
    each fold re-initializes the last ``cfg.finetune_layers`` layers and
    trains them on the data outside the fold. With zero fine-tune epochs the
    fold models are plain copies of the base.

    Raises:
        PipelineError: a fold (or the base model) diverged; carries ``fold_index``
    """
    dims = layer_dims_for(dataset, hidden_dims)
    head = dataset.task.head
    started = time.perf_counter()

    base: Optional[MlpModel] = None
    base_log: Optional[TrainLog] = None
    if cfg.mode == "finetune":
        base_cfg = cfg.aux_train_cfg.model_copy(update={"seed": derive_seed(cfg.seed, 53)})
        try:
            outcome = train(init_mlp(dims, head, derive_seed(cfg.seed, 52)), dataset, base_cfg, val_set=val_set)
        except TrainingDivergedError as e:
            raise PipelineError(f"auxiliary base model diverged: {e}") from e
        base, base_log = outcome.model, outcome.log
        logger.info("trained fine-tune base model (%d epochs)", len(base_log.epochs))
        mask = LayerMask.last(base.num_layers, cfg.finetune_layers)

    def fold_job(fold: int) -> Callable[[], tuple[MlpModel, TrainLog]]:
        def run() -> tuple[MlpModel, TrainLog]:
            train_part = dataset.exclude_ids(folds.fold_ids(fold))
            try:
                if base is None:
                    model = init_mlp(dims, head, derive_seed(cfg.seed, 50, fold))
                    outcome = train(model, train_part, _fold_train_cfg(cfg, fold), val_set=val_set)
                else:
                    ft_cfg = _finetune_cfg(cfg, fold)
                    if ft_cfg.epochs == 0:
                        return base.copy(), TrainLog()
                    outcome = reinit_and_finetune(base, mask, train_part, ft_cfg, val_set=val_set)
            except TrainingDivergedError as e:
                raise PipelineError(f"auxiliary model for fold {fold} diverged: {e}", fold_index=fold) from e
            logger.debug("fold %d trained on %d samples", fold, len(train_part))
            return outcome.model, outcome.log

        return run

    results = run_ordered(
        [fold_job(i) for i in range(folds.n_folds)], workers, on_progress=on_progress, label=f"aux folds ({cfg.mode})"
    )
    return AuxModels(
        models=[m for m, _ in results],
        logs=[log for _, log in results],
        base=base,
        base_log=base_log,
        seconds=time.perf_counter() - started,
    )


def compute_flood_table(
    dataset: Dataset,
    folds: FoldAssignment,
    aux_models: Sequence[MlpModel],
    gamma: float,
    *,
    provenance: Optional[FloodTableProvenance] = None,
) -> FloodTable:
    """Score every sample with the model whose held-out fold contains it.

    Raises:
        PipelineError: model count differs from fold count, or folds do not
            cover exactly the dataset's sample IDs
    """
    if len(aux_models) != folds.n_folds:
        raise PipelineError(f"{len(aux_models)} auxiliary models for {folds.n_folds} folds")
    if not np.array_equal(np.sort(dataset.sample_ids), folds.sample_ids):
        raise PipelineError("fold assignment does not cover the dataset's sample IDs")

    ids: list[np.ndarray] = []
    thetas: list[np.ndarray] = []
    for fold, model in enumerate(aux_models):
        held = dataset.select_ids(folds.fold_ids(fold))
        if model.input_dim != held.dim:
            raise PipelineError(f"auxiliary model {fold} expects {model.input_dim} features, data has {held.dim}", fold_index=fold)
        preds = forward(model, held.features)
        if dataset.task.is_classification:
            theta = theta_classification_batch(preds, held.labels, gamma)
        else:
            theta = theta_regression_batch(preds[:, 0], held.labels, gamma)
        ids.append(held.sample_ids)
        thetas.append(theta)
    return FloodTable(
        np.concatenate(ids),
        np.concatenate(thetas),
        provenance or FloodTableProvenance(n_folds=folds.n_folds, gamma=gamma),
    )


def validate_finetune(table_ft: FloodTable, table_cv: FloodTable) -> float:
    """Spearman correlation between a fine-tuned and a cross-validated table.

    Raises:
        ValidationError: the tables cover different sample IDs
    """
    if not np.array_equal(table_ft.ids, table_cv.ids):
        raise ValidationError("flood tables cover different sample IDs")
    return spearman(table_ft.theta, table_cv.theta)


def checkpoint_hash(model: MlpModel) -> str:
    return hashlib.sha256(dumps_checkpoint(model)).hexdigest()


def provenance_for(cfg: AuxConfig, gamma: float, models: Sequence[MlpModel]) -> FloodTableProvenance:
    return FloodTableProvenance(
        n_folds=cfg.n_folds,
        mode=cfg.mode,
        gamma=gamma,
        seed=cfg.seed,
        aux_checkpoint_hashes=[checkpoint_hash(m) for m in models],
    )


def run_aux_pipeline(
    dataset: Dataset,
    cfg: AuxConfig,
    aux_paths: AuxPaths,
    *,
    hidden_dims: Sequence[int],
    val_set: Optional[Dataset] = None,
    workers: int = 1,
    ledger: Optional[LedgerWriter] = None,
    on_progress: Optional[ProgressCallback] = None,
) -> AuxRun:
    """Folds, auxiliary training, checkpoints and the persisted flood table."""
    folds = make_folds(dataset, cfg.n_folds, cfg.seed)
    aux = train_aux_models(
        dataset, folds, cfg, hidden_dims=hidden_dims, val_set=val_set, workers=workers, on_progress=on_progress
    )

    if aux.base is not None:
        save_checkpoint(aux.base, aux_paths.base_checkpoint)
        if ledger:
            ledger.append_event(
                "AUX_BASE_TRAINED",
                {"checkpoint": str(aux_paths.base_checkpoint), "epochs": len(aux.base_log.epochs)},
            )
    for fold, model in enumerate(aux.models):
        path = save_checkpoint(model, aux_paths.fold_checkpoint(fold))
        if ledger:
            ledger.append_event(
                "AUX_FOLD_TRAINED",
                {"fold": fold, "checkpoint": str(path), "held_out": len(folds.fold_ids(fold))},
            )

    provenance = provenance_for(cfg, cfg.gamma, aux.models)
    table = compute_flood_table(dataset, folds, aux.models, cfg.gamma, provenance=provenance)
    save_flood_table(table, aux_paths.flood_table_csv)
    logger.info("flood table: %d samples, mean theta %.4f", len(table), float(np.mean(table.theta)) if len(table) else 0.0)
    if ledger:
        ledger.append_event(
            "FLOOD_TABLE_WRITTEN",
            {"path": str(aux_paths.flood_table_csv), "content_hash": table.content_hash(), "gamma": cfg.gamma},
        )
    return AuxRun(folds=folds, aux=aux, table=table, checkpoint_hashes=list(provenance.aux_checkpoint_hashes))


def load_aux_models(aux_paths: AuxPaths, n_folds: int) -> list[MlpModel]:
    """Reload fold checkpoints written by ``run_aux_pipeline``."""
    return [load_checkpoint(aux_paths.fold_checkpoint(i), produced_by="train-aux") for i in range(n_folds)]


def table_for_gamma(dataset: Dataset, cfg: AuxConfig, models: Sequence[MlpModel], gamma: float) -> FloodTable:
    """Recompute the flood table for another gamma from existing fold models."""
    folds = make_folds(dataset, cfg.n_folds, cfg.seed)
    return compute_flood_table(dataset, folds, models, gamma, provenance=provenance_for(cfg, gamma, models))
