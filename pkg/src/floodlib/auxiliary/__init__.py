"""Cross-validated flood-level estimation."""

from .folds import FoldAssignment, make_folds
from .pipeline import (
    AuxModels,
    AuxRun,
    compute_flood_table,
    load_aux_models,
    run_aux_pipeline,
    table_for_gamma,
    train_aux_models,
    validate_finetune,
)

__all__ = [
    "AuxModels",
    "AuxRun",
    "FoldAssignment",
    "compute_flood_table",
    "load_aux_models",
    "make_folds",
    "run_aux_pipeline",
    "table_for_gamma",
    "train_aux_models",
    "validate_finetune",
]
