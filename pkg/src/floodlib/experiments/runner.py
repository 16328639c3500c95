"""Experiment orchestration: data, auxiliary pipeline, main-model training and evaluation."""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..auxiliary.pipeline import AuxRun, layer_dims_for, load_aux_models, run_aux_pipeline, table_for_gamma
from ..config import config_snapshot
from ..data.csvio import export_csv, load_csv
from ..data.dataset import Dataset, split
from ..data.noise import add_skew_noise, flip_labels
from ..data.toy import gen_toy_gaussian, gen_toy_gaussian_test, gen_toy_regression
from ..errors import ConfigError, TrainingDivergedError
from ..flood.objectives import FloodObjective
from ..flood.table import FloodTable, load_flood_table
from ..jsonio import sha256_file, write_json
from ..ledger import LedgerWriter
from ..metrics import classification_metrics, regression_metric_dict
from ..models.config import ExperimentConfig, FloodConfig, MethodSpec, NoiseSpec
from ..models.results import ExperimentResult, MethodResult, SeedRun, TrainLog
from ..nn.checkpoint import load_checkpoint, save_checkpoint
from ..nn.mlp import MlpModel, forward, init_mlp
from ..nn.training import TrainOutcome, train
from ..parallel import ProgressCallback, run_ordered
from ..paths import ExperimentPaths
from ..seeding import derive_seed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentData:
    """Splits of one experiment. Only ``train`` carries injected noise."""

    train: Dataset
    val: Dataset
    test: Dataset
    b: Optional[Dataset] = None


@dataclass
class ExperimentContext:
    cfg: ExperimentConfig
    paths: ExperimentPaths
    ledger: LedgerWriter
    on_progress: Optional[ProgressCallback] = None
    _data: Optional[ExperimentData] = field(default=None, repr=False)
    _data_lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def create(cls, cfg: ExperimentConfig, on_progress: Optional[ProgressCallback] = None) -> "ExperimentContext":
        paths = ExperimentPaths(cfg.out_dir, cfg.name)
        paths.ensure()
        write_json(paths.config_snapshot, config_snapshot(cfg))
        return cls(cfg=cfg, paths=paths, ledger=LedgerWriter(paths.ledger_file), on_progress=on_progress)

    @property
    def data(self) -> ExperimentData:
        with self._data_lock:
            if self._data is None:
                self._data = build_datasets(self.cfg)
            return self._data


def apply_noise(dataset: Dataset, noise: NoiseSpec) -> Dataset:
    if noise.label_flip_percent > 0:
        dataset = flip_labels(dataset, noise.label_flip_percent, noise.seed)
    if noise.skew_alpha is not None:
        dataset = add_skew_noise(dataset, noise.skew_alpha, noise.skew_scale, noise.seed)
    return dataset


def build_datasets(cfg: ExperimentConfig) -> ExperimentData:
    """Rebuild every split deterministically from the config.

    Toy Gaussian: train/val split from dataset A, B kept aside, clean test set.
    Toy regression: an independent stream for the test set.
    CSV: the test file when given, otherwise a ``test_frac`` share of the main
    file. ``train_frac`` then splits what remains into train and validation.
    """
    spec = cfg.dataset
    b: Optional[Dataset] = None
    if spec.kind == "toy_gaussian":
        pair = gen_toy_gaussian(spec.toy_gaussian)
        pool, b = pair.a, pair.b
        test = gen_toy_gaussian_test(spec.toy_gaussian, pair.means, spec.n_test)
    elif spec.kind == "toy_regression":
        pool = gen_toy_regression(spec.toy_regression)
        test = gen_toy_regression(spec.toy_regression, n=spec.n_test, stream=1, id_offset=spec.toy_regression.n_samples)
    else:
        pool = load_csv(spec.csv_path, spec.target_column, spec.task, spec.num_classes)
        if spec.test_csv_path is not None:
            num_classes = pool.task.num_classes if pool.task.is_classification else None
            test = load_csv(spec.test_csv_path, spec.target_column, spec.task, num_classes)
        else:
            pool, test = split(pool, 1.0 - spec.test_frac, derive_seed(spec.split_seed, 1))

    train_part, val = split(pool, spec.train_frac, spec.split_seed)
    return ExperimentData(train=apply_noise(train_part, cfg.noise), val=val, test=test, b=b)


def evaluate_model(model: MlpModel, dataset: Dataset, names: list[str]) -> dict[str, float]:
    """Selected metrics of ``model`` on ``dataset``; empty when the dataset is empty."""
    if len(dataset) == 0:
        return {}
    preds = forward(model, dataset.features)
    if dataset.task.is_classification:
        return classification_metrics(preds, dataset.labels, names)
    return regression_metric_dict(preds[:, 0], dataset.labels, names)


def mean_and_stderr(values: list[dict[str, float]]) -> tuple[dict[str, float], dict[str, float]]:
    """Per-metric mean and standard error (sample std / sqrt(n); 0 for one run)."""
    if not values:
        return {}, {}
    mean: dict[str, float] = {}
    stderr: dict[str, float] = {}
    for key in values[0]:
        arr = np.array([v[key] for v in values], dtype=np.float64)
        mean[key] = float(arr.mean())
        stderr[key] = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, stderr


# ---------------------------------------------------------------------------
# gen-data / train-aux
# ---------------------------------------------------------------------------


def cmd_gen_data(ctx: ExperimentContext) -> dict:
    """Export every split as CSV plus a manifest with row counts and hashes."""
    data = ctx.data
    splits = {"train": data.train, "val": data.val, "test": data.test}
    if data.b is not None:
        splits["b"] = data.b

    manifest: dict = {"name": ctx.cfg.name, "task": ctx.cfg.task, "splits": {}}
    for name, dataset in splits.items():
        path = export_csv(dataset, ctx.paths.data_csv(name))
        manifest["splits"][name] = {
            "file": path.name,
            "rows": len(dataset),
            "noisy": int(np.sum(dataset.noise_flags)),
            "sha256": sha256_file(path),
        }
    write_json(ctx.paths.data_manifest, manifest)
    ctx.ledger.append_event("DATA_GENERATED", {"manifest": str(ctx.paths.data_manifest), "splits": list(splits)})
    return manifest


def cmd_train_aux(ctx: ExperimentContext) -> AuxRun:
    cfg = ctx.cfg
    if cfg.aux is None:
        raise ConfigError("train-aux needs an 'aux' section in the experiment config")
    return run_aux_pipeline(
        ctx.data.train,
        cfg.aux,
        ctx.paths.aux,
        hidden_dims=cfg.model.hidden_dims,
        val_set=ctx.data.val,
        workers=cfg.workers,
        ledger=ctx.ledger,
        on_progress=ctx.on_progress,
    )


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------


def train_main(
    cfg: ExperimentConfig,
    data: ExperimentData,
    flood: FloodConfig,
    table: Optional[FloodTable],
    seed: int,
) -> TrainOutcome:
    """Train one main model. Initialization and batch order depend only on ``seed``."""
    dims = layer_dims_for(data.train, cfg.model.hidden_dims)
    model = init_mlp(dims, data.train.task.head, derive_seed(seed, 60))
    train_cfg = cfg.train.model_copy(update={"seed": derive_seed(seed, 61)})
    return train(model, data.train, train_cfg, FloodObjective(flood, table), val_set=data.val)


def _selection_score(cfg: ExperimentConfig, metrics: dict[str, float]) -> float:
    """Higher is better: validation accuracy, or negative validation MSE."""
    return metrics["accuracy"] if cfg.task == "classification" else -metrics["mse"]


def _persisted_table(ctx: ExperimentContext) -> FloodTable:
    path = ctx.cfg.flood_table_path or ctx.paths.aux.flood_table_csv
    return load_flood_table(path)


def _table_for(ctx: ExperimentContext, flood: FloodConfig) -> Optional[FloodTable]:
    """Flood table for an AdaFlood method.

    An explicit ``flood_table_path`` is used as is. Otherwise the table from
    ``train-aux`` is used when its gamma matches; a different gamma is
    recomputed from the saved fold checkpoints.
    """
    if flood.variant != "adaflood":
        return None
    table = _persisted_table(ctx)
    if ctx.cfg.flood_table_path is not None or table.created_by.gamma == flood.gamma:
        return table
    return _table_from_checkpoints(ctx, flood.gamma)


def _table_from_checkpoints(ctx: ExperimentContext, gamma: float) -> FloodTable:
    aux = ctx.cfg.aux
    models = load_aux_models(ctx.paths.aux, aux.n_folds)
    return table_for_gamma(ctx.data.train, aux, models, gamma)


def _sweep(ctx: ExperimentContext, method: MethodSpec) -> tuple[FloodConfig, dict[str, float]]:
    """Pick b (Flood/iFlood) or gamma (AdaFlood) by validation score on the first seed.

    Ties keep the earliest grid value.
    """
    cfg, data = ctx.cfg, ctx.data
    if len(data.val) == 0:
        raise ConfigError(f"method {method.name!r}: a grid sweep needs a non-empty validation split")
    key = "gamma" if method.flood.variant == "adaflood" else "b"
    names = ["accuracy"] if cfg.task == "classification" else ["mse"]

    def point(value: float):
        def run() -> tuple[FloodConfig, float]:
            flood = method.flood.model_copy(update={key: value})
            table = _table_from_checkpoints(ctx, value) if key == "gamma" else None
            outcome = train_main(cfg, data, flood, table, cfg.seeds[0])
            return flood, _selection_score(cfg, evaluate_model(outcome.model, data.val, names))

        return run

    results = run_ordered(
        [point(v) for v in method.grid], cfg.workers, on_progress=ctx.on_progress, label=f"sweep {method.name}"
    )
    sweep = {repr(float(v)): score for v, (_, score) in zip(method.grid, results)}
    best = max(range(len(results)), key=lambda i: (results[i][1], -i))
    chosen = results[best][0]
    ctx.ledger.append_event(
        "SWEEP_POINT_SELECTED",
        {"method": method.name, "parameter": key, "value": method.grid[best], "score": results[best][1]},
    )
    logger.info("method %s: selected %s=%s", method.name, key, method.grid[best])
    return chosen, sweep


def _run_seed(ctx: ExperimentContext, method: MethodSpec, flood: FloodConfig, table: Optional[FloodTable], seed: int) -> SeedRun:
    cfg, data, paths = ctx.cfg, ctx.data, ctx.paths
    names = cfg.resolved_metrics()
    try:
        outcome = train_main(cfg, data, flood, table, seed)
    except TrainingDivergedError as e:
        failed = e.log if isinstance(e.log, TrainLog) else TrainLog(failed=True, failure=str(e))
        write_json(paths.metrics_file(seed, method.name), {"seed": seed, "log": failed.model_dump(mode="json")})
        ctx.ledger.append_event(
            "TRAIN_RUN_FAILED", {"method": method.name, "seed": seed, "epoch": e.epoch, "error": str(e)}
        )
        raise
    checkpoint = save_checkpoint(outcome.model, paths.model_checkpoint(seed, method.name))
    run = SeedRun(
        seed=seed,
        metrics=evaluate_model(outcome.model, data.test, names),
        val_metrics=evaluate_model(outcome.model, data.val, names),
        log=outcome.log,
        checkpoint=str(checkpoint),
    )
    write_json(paths.metrics_file(seed, method.name), run.model_dump(mode="json"))
    ctx.ledger.append_event("TRAIN_RUN_COMPLETED", {"method": method.name, "seed": seed, "metrics": run.metrics})
    return run


def run_method(ctx: ExperimentContext, method: MethodSpec) -> MethodResult:
    cfg = ctx.cfg
    flood, sweep, selected = method.flood, {}, None
    if method.grid:
        flood, sweep = _sweep(ctx, method)
        selected = flood.gamma if flood.variant == "adaflood" else flood.b
    table = _table_for(ctx, flood)

    runs = run_ordered(
        [lambda s=s: _run_seed(ctx, method, flood, table, s) for s in cfg.seeds],
        cfg.workers,
        on_progress=ctx.on_progress,
        label=f"train {method.name}",
    )
    mean, stderr = mean_and_stderr([r.metrics for r in runs])
    return MethodResult(
        name=method.name,
        variant=flood.variant,
        selected=selected,
        sweep=sweep,
        flood_table=None
        if table is None
        else {"content_hash": table.content_hash(), "gamma": table.created_by.gamma, "size": len(table)},
        runs=runs,
        mean=mean,
        stderr=stderr,
    )


def cmd_train(ctx: ExperimentContext) -> ExperimentResult:
    """Train every configured method on every seed and write ``summary.json``.

    Wall-clock seconds per method go to ``timings.json``.
    """
    cfg = ctx.cfg
    methods: list[MethodResult] = []
    timings: dict[str, float] = {}
    for method in cfg.methods:
        started = time.perf_counter()
        methods.append(run_method(ctx, method))
        timings[method.name] = time.perf_counter() - started

    result = ExperimentResult(name=cfg.name, config=config_snapshot(cfg), task=cfg.task, methods=methods)
    write_json(ctx.paths.summary_file, result.model_dump(mode="json"))
    write_json(ctx.paths.timings_file, {"seconds": timings})
    return result


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------


def load_run_model(ctx: ExperimentContext, seed: int, method: str) -> MlpModel:
    return load_checkpoint(ctx.paths.model_checkpoint(seed, method), produced_by="train")


def cmd_evaluate(ctx: ExperimentContext) -> dict:
    """Re-evaluate saved checkpoints on the clean test split."""
    cfg = ctx.cfg
    names = cfg.resolved_metrics()
    report: dict = {"name": cfg.name, "task": cfg.task, "methods": {}}
    for method in cfg.methods:
        per_seed = {str(s): evaluate_model(load_run_model(ctx, s, method.name), ctx.data.test, names) for s in cfg.seeds}
        mean, stderr = mean_and_stderr(list(per_seed.values()))
        report["methods"][method.name] = {"seeds": per_seed, "mean": mean, "stderr": stderr}
    write_json(ctx.paths.evaluation_file, report)
    ctx.ledger.append_event("EVALUATION_WRITTEN", {"path": str(ctx.paths.evaluation_file)})
    return report
