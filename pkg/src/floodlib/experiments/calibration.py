"""Reliability data and ECE for every trained method and seed."""

from __future__ import annotations

import logging

from ..jsonio import write_json
from ..metrics import ece
from ..nn.mlp import forward
from .runner import ExperimentContext, load_run_model, mean_and_stderr

logger = logging.getLogger(__name__)

ECE_BINS = 10


def cmd_calibrate(ctx: ExperimentContext) -> dict:
    """Write one ``calibration.json`` per (seed, method) and a summary ordered by mean ECE.

    Raises:
        TaskMismatchError: regression experiment
        MissingArtifactError: a method/seed has no checkpoint yet
    """
    cfg = ctx.cfg
    test = ctx.data.test
    test.require_task("classification", "calibrate")

    rows: list[dict] = []
    for method in cfg.methods:
        per_seed: dict[str, float] = {}
        for seed in cfg.seeds:
            model = load_run_model(ctx, seed, method.name)
            report = ece(forward(model, test.features), test.labels, bins=ECE_BINS)
            path = write_json(ctx.paths.calibration_file(seed, method.name), report.model_dump(mode="json"))
            per_seed[str(seed)] = report.ece
            logger.debug("calibration %s seed %d: ece=%.4f -> %s", method.name, seed, report.ece, path)
        mean, stderr = mean_and_stderr([{"ece": v} for v in per_seed.values()])
        rows.append({"method": method.name, "mean_ece": mean["ece"], "stderr_ece": stderr["ece"], "per_seed": per_seed})

    rows.sort(key=lambda r: (r["mean_ece"], r["method"]))
    summary = {"name": cfg.name, "bins": ECE_BINS, "methods": rows}
    write_json(ctx.paths.calibration_summary_file, summary)
    ctx.ledger.append_event(
        "CALIBRATION_WRITTEN",
        {"summary": str(ctx.paths.calibration_summary_file), "files": len(rows) * len(cfg.seeds)},
    )
    return summary
