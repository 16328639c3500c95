"""Pydantic records for training logs, experiment results and calibration reports."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class EpochRecord(BaseModel):
    epoch: int
    lr: float
    train_objective: float
    train_loss: float
    val_loss: Optional[float] = None


class TrainLog(BaseModel):
    """Per-epoch metrics of one training run."""

    epochs: list[EpochRecord] = Field(default_factory=list)
    best_epoch: Optional[int] = None
    stopped_early: bool = False
    failed: bool = False
    failure: Optional[str] = None
    # epochs x samples; filled only when a tracking set is passed to train()
    tracked_losses: Optional[list[list[float]]] = None
    tracked_ids: Optional[list[int]] = None


class SeedRun(BaseModel):
    seed: int
    metrics: dict[str, float]
    val_metrics: dict[str, float] = Field(default_factory=dict)
    log: TrainLog
    checkpoint: str


class MethodResult(BaseModel):
    name: str
    variant: str
    selected: Optional[float] = Field(default=None, description="Chosen b or gamma from the validation sweep")
    sweep: dict[str, float] = Field(default_factory=dict, description="Validation score per grid value")
    flood_table: Optional[dict] = None
    runs: list[SeedRun] = Field(default_factory=list)
    mean: dict[str, float] = Field(default_factory=dict)
    stderr: dict[str, float] = Field(default_factory=dict)


class ExperimentResult(BaseModel):
    """Everything needed to trace and re-run an experiment.

    Wall-clock timings live in a sibling ``timings.json`` so this record is
    byte-identical across reruns.
    """

    name: str
    config: dict
    task: str
    methods: list[MethodResult] = Field(default_factory=list)
    timings_file: str = "timings.json"


class CalibrationReport(BaseModel):
    """Reliability-diagram data plus ECE."""

    bin_edges: list[float]
    counts: list[int]
    mean_confidence: list[float]
    mean_accuracy: list[float]
    ece: float
    n: int
