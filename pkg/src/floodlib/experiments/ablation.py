"""Fine-tuned versus scratch auxiliary models: wall-clock, table agreement and downstream metrics."""

from __future__ import annotations

import logging

from ..auxiliary.pipeline import AuxRun, run_aux_pipeline, validate_finetune
from ..errors import ConfigError
from ..jsonio import write_json
from ..models.config import AuxConfig, FloodConfig
from ..parallel import run_ordered
from .runner import ExperimentContext, evaluate_model, mean_and_stderr, train_main

logger = logging.getLogger(__name__)


def _ablation_configs(ctx: ExperimentContext) -> dict[str, AuxConfig]:
    """Scratch plus one fine-tune config per trailing-layer count, sharing folds and seed."""
    base = ctx.cfg.aux
    if base is None:
        raise ConfigError("ablate-finetune needs an 'aux' section in the experiment config")
    gamma = ctx.cfg.ablation.gamma
    num_layers = len(ctx.cfg.model.hidden_dims) + 1
    configs = {"scratch": base.model_copy(update={"mode": "scratch", "gamma": gamma})}
    for count in ctx.cfg.ablation.masks:
        if not 1 <= count <= num_layers:
            raise ConfigError(f"ablation mask of {count} layers does not fit a {num_layers}-layer model")
        configs[f"finetune_last{count}"] = base.model_copy(
            update={"mode": "finetune", "finetune_layers": count, "gamma": gamma}
        )
    return configs


def _downstream(ctx: ExperimentContext, run: AuxRun) -> tuple[dict[str, float], dict[str, float]]:
    cfg, data = ctx.cfg, ctx.data
    flood = FloodConfig(variant="adaflood", gamma=cfg.ablation.gamma)
    names = cfg.resolved_metrics()
    metrics = run_ordered(
        [lambda s=s: evaluate_model(train_main(cfg, data, flood, run.table, s).model, data.test, names) for s in cfg.seeds],
        cfg.workers,
    )
    return mean_and_stderr(metrics)


def cmd_ablation_finetune(ctx: ExperimentContext) -> dict:
    """Build a flood table per auxiliary mode and compare them.

    ``ablation.json`` holds Spearman agreement with the scratch table and
    downstream AdaFlood test metrics per mode. Wall-clock seconds per mode go
    to ``ablation_timings.json``.
    """
    cfg, data = ctx.cfg, ctx.data
    runs: dict[str, AuxRun] = {}
    for label, aux_cfg in _ablation_configs(ctx).items():
        runs[label] = run_aux_pipeline(
            data.train,
            aux_cfg,
            ctx.paths.ablation_aux(label),
            hidden_dims=cfg.model.hidden_dims,
            val_set=data.val,
            workers=cfg.workers,
            on_progress=ctx.on_progress,
        )
        logger.info("ablation %s: %.2fs", label, runs[label].aux.seconds)

    scratch = runs["scratch"]
    modes: dict[str, dict] = {}
    for label, run in runs.items():
        mean, stderr = _downstream(ctx, run)
        modes[label] = {
            "mode": run.table.created_by.mode,
            "table_hash": run.table.content_hash(),
            "spearman_vs_scratch": 1.0 if run is scratch else validate_finetune(run.table, scratch.table),
            "dispersion": run.table.describe(),
            "metrics_mean": mean,
            "metrics_stderr": stderr,
        }

    timings = {label: run.aux.seconds for label, run in runs.items()}
    report = {"name": cfg.name, "gamma": cfg.ablation.gamma, "n_folds": scratch.folds.n_folds, "modes": modes}
    write_json(ctx.paths.ablation_file, report)
    write_json(ctx.paths.ablation_timings_file, {"seconds": timings})
    ctx.ledger.append_event("ABLATION_COMPLETED", {"modes": list(modes), "seconds": timings})
    return report
