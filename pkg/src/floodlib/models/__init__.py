"""Pydantic schemas for configuration, results and ledger events."""

from .config import (
    AblationSpec,
    AuxConfig,
    DatasetSpec,
    ExperimentConfig,
    FloodConfig,
    MethodSpec,
    ModelSpec,
    MotivationSpec,
    NoiseSpec,
    PropositionSpec,
    ToyGaussianConfig,
    ToyRegressionConfig,
    TrainConfig,
)
from .ledger import LedgerEvent
from .results import (
    CalibrationReport,
    EpochRecord,
    ExperimentResult,
    MethodResult,
    SeedRun,
    TrainLog,
)

__all__ = [
    "AblationSpec",
    "AuxConfig",
    "CalibrationReport",
    "DatasetSpec",
    "EpochRecord",
    "ExperimentConfig",
    "ExperimentResult",
    "FloodConfig",
    "LedgerEvent",
    "MethodResult",
    "MethodSpec",
    "ModelSpec",
    "MotivationSpec",
    "NoiseSpec",
    "PropositionSpec",
    "SeedRun",
    "ToyGaussianConfig",
    "ToyRegressionConfig",
    "TrainConfig",
    "TrainLog",
]
