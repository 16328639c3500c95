"""Experiment workflows behind the CLI subcommands."""

from .ablation import cmd_ablation_finetune
from .calibration import cmd_calibrate
from .motivation import cmd_motivation
from .proposition import PropositionReport, check_proposition, cmd_proposition_check
from .runner import (
    ExperimentContext,
    ExperimentData,
    build_datasets,
    cmd_evaluate,
    cmd_gen_data,
    cmd_train,
    cmd_train_aux,
    evaluate_model,
    mean_and_stderr,
    train_main,
)

__all__ = [
    "ExperimentContext",
    "ExperimentData",
    "PropositionReport",
    "build_datasets",
    "check_proposition",
    "cmd_ablation_finetune",
    "cmd_calibrate",
    "cmd_evaluate",
    "cmd_gen_data",
    "cmd_motivation",
    "cmd_proposition_check",
    "cmd_train",
    "cmd_train_aux",
    "evaluate_model",
    "mean_and_stderr",
    "train_main",
]
