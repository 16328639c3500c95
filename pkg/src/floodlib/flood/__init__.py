"""Flood objectives, correction functions and flood-level tables."""

from .correction import (
    correct_classification,
    correct_regression,
    theta_classification_batch,
    theta_regression,
    theta_regression_batch,
)
from .objectives import (
    FloodObjective,
    ObjectiveValue,
    adaflood_objective,
    flood_objective,
    iflood_objective,
    plain_objective,
)
from .table import FloodTable, FloodTableProvenance, load_flood_table, save_flood_table, sidecar_path

__all__ = [
    "FloodObjective",
    "FloodTable",
    "FloodTableProvenance",
    "ObjectiveValue",
    "adaflood_objective",
    "correct_classification",
    "correct_regression",
    "flood_objective",
    "iflood_objective",
    "load_flood_table",
    "plain_objective",
    "save_flood_table",
    "sidecar_path",
    "theta_classification_batch",
    "theta_regression",
    "theta_regression_batch",
]
