"""Memorized versus held-out per-sample losses on the toy Gaussian, by sample type.

A model trained on dataset A drives the loss of every A sample down,
mislabeled ones included. A model trained on the sibling dataset B scores A
without having seen it, which keeps mislabeled samples visibly hard. The
same gap shows up in cross-validated flood levels.
"""

from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from ..auxiliary.folds import make_folds
from ..auxiliary.pipeline import compute_flood_table, layer_dims_for, train_aux_models
from ..data.dataset import Dataset
from ..data.toy import gen_toy_gaussian
from ..errors import ConfigError
from ..jsonio import write_json
from ..models.config import AuxConfig
from ..nn.mlp import init_mlp
from ..nn.training import train
from ..seeding import derive_seed
from .runner import ExperimentContext

logger = logging.getLogger(__name__)

SAMPLE_TYPES = ("regular", "irregular", "mislabeled")


def _type_medians(values: np.ndarray, types: np.ndarray) -> dict[str, float]:
    out: dict[str, float] = {}
    for name in SAMPLE_TYPES:
        mask = types == name
        if mask.any():
            out[name] = float(np.median(values[mask]))
    return out


def _curve_medians(curves: list[list[float]], types: np.ndarray) -> dict[str, list[float]]:
    matrix = np.asarray(curves, dtype=np.float64)
    return {
        name: [float(v) for v in np.median(matrix[:, types == name], axis=1)]
        for name in SAMPLE_TYPES
        if np.any(types == name)
    }


def _track(ctx: ExperimentContext, fit_on: Dataset, score: Dataset, seed: int) -> list[list[float]]:
    spec = ctx.cfg.motivation
    train_cfg = ctx.cfg.train.model_copy(
        update={"epochs": spec.epochs, "early_stop_patience": 0, "seed": derive_seed(seed, 81)}
    )
    model = init_mlp(layer_dims_for(fit_on, spec.hidden_dims), fit_on.task.head, derive_seed(seed, 80))
    return train(model, fit_on, train_cfg, track=score).log.tracked_losses


def _margin(medians: dict[str, float]) -> Optional[float]:
    if "mislabeled" not in medians or "regular" not in medians:
        return None
    return medians["mislabeled"] - medians["regular"]


def _seed_report(ctx: ExperimentContext, a: Dataset, b: Dataset, types: np.ndarray, seed: int) -> dict:
    cfg = ctx.cfg
    memorized = _track(ctx, a, a, seed)
    held_out = _track(ctx, b, a, derive_seed(seed, 1))

    aux_cfg = (cfg.aux or AuxConfig(n_folds=2)).model_copy(
        update={
            "mode": "scratch",
            "gamma": 0.0,
            "seed": derive_seed(seed, 82),
            "aux_train_cfg": cfg.train.model_copy(update={"epochs": cfg.motivation.epochs, "early_stop_patience": 0}),
        }
    )
    folds = make_folds(a, aux_cfg.n_folds, aux_cfg.seed)
    aux = train_aux_models(a, folds, aux_cfg, hidden_dims=cfg.motivation.hidden_dims, workers=cfg.workers)
    theta = compute_flood_table(a, folds, aux.models, 0.0).lookup(a.sample_ids)
    theta_medians = _type_medians(theta, types)
    logger.info("seed %d: cv theta margin (mislabeled - regular) %s", seed, _margin(theta_medians))

    return {
        "seed": seed,
        "memorized": {
            "final_median": _type_medians(np.asarray(memorized[-1]), types),
            "curve_median": _curve_medians(memorized, types),
        },
        "held_out": {
            "final_median": _type_medians(np.asarray(held_out[-1]), types),
            "curve_median": _curve_medians(held_out, types),
        },
        "cv_theta": {"n_folds": aux_cfg.n_folds, "median": theta_medians, "margin": _margin(theta_medians)},
    }


def cmd_motivation(ctx: ExperimentContext) -> dict:
    """Write ``motivation.json``: per-seed loss curves and medians by sample type.

    Dataset A and B are fixed by the dataset config; each run seed changes
    model initialization, batch order and the fold assignment. ``worst_case``
    holds the largest memorized mislabeled loss and the smallest CV theta
    margin over all seeds.
    """
    cfg = ctx.cfg
    if cfg.dataset.kind != "toy_gaussian":
        raise ConfigError("motivation runs on the toy_gaussian dataset")
    pair = gen_toy_gaussian(cfg.dataset.toy_gaussian)
    types = np.asarray(pair.a.sample_types)

    runs = [_seed_report(ctx, pair.a, pair.b, types, seed) for seed in cfg.seeds]
    memorized_mislabeled = [r["memorized"]["final_median"].get("mislabeled") for r in runs]
    margins = [r["cv_theta"]["margin"] for r in runs]

    report = {
        "name": cfg.name,
        "epochs": cfg.motivation.epochs,
        "counts": {name: int(np.sum(types == name)) for name in SAMPLE_TYPES},
        "seeds": runs,
        "worst_case": {
            "memorized_mislabeled_final": None if None in memorized_mislabeled else max(memorized_mislabeled),
            "cv_theta_margin": None if None in margins else min(margins),
        },
    }
    write_json(ctx.paths.motivation_file, report)
    ctx.ledger.append_event(
        "MOTIVATION_COMPLETED", {"path": str(ctx.paths.motivation_file), "worst_case": report["worst_case"]}
    )
    return report
