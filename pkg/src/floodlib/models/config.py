"""Configuration schemas for experiments.

One JSON document per experiment is validated into ``ExperimentConfig``.
Unknown keys are rejected so typos surface as config errors.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

FloodVariant = Literal["unregularized", "flood", "iflood", "adaflood"]
AuxMode = Literal["scratch", "finetune"]
TaskKind = Literal["classification", "regression"]
MetricName = Literal["accuracy", "nll", "ece", "mse", "mae", "r2"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class TrainConfig(_Strict):
    """SGD training hyperparameters.

    ``epochs`` may be 0, which returns the (re-initialized) model untouched;
    useful for fine-tuning checks.
    """

    epochs: int = Field(default=100, ge=0)
    batch_size: int = Field(default=32, gt=0)
    lr0: float = Field(default=0.1, gt=0)
    lr_decay: float = Field(default=0.2, gt=0, le=1)
    lr_step_epochs: int = Field(default=30, gt=0)
    l2_weight: float = Field(default=1e-4, ge=0)
    early_stop_patience: int = Field(default=0, ge=0)
    seed: int = 0

    def lr_at(self, epoch: int) -> float:
        """Learning rate for a 0-based epoch index."""
        return self.lr0 * self.lr_decay ** (epoch // self.lr_step_epochs)


class FloodConfig(_Strict):
    """Regularizer selector. Fields that a variant does not use are ignored."""

    variant: FloodVariant = "unregularized"
    b: float = 0.0
    gamma: float = Field(default=0.0, ge=0.0, le=1.0)

    @field_validator("b")
    @classmethod
    def _finite_b(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("flood level b must be finite")
        return value


class MethodSpec(_Strict):
    """A named training method; ``grid`` sweeps b (flood/iflood) or gamma (adaflood)."""

    name: str
    flood: FloodConfig = Field(default_factory=FloodConfig)
    grid: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _grid_matches_variant(self) -> "MethodSpec":
        if self.grid and self.flood.variant == "unregularized":
            raise ValueError(f"method {self.name!r}: unregularized has no hyperparameter to sweep")
        if self.flood.variant == "adaflood":
            bad = [g for g in self.grid if not 0.0 <= g <= 1.0]
            if bad:
                raise ValueError(f"method {self.name!r}: gamma grid values outside [0, 1]: {bad}")
        return self


class AuxConfig(_Strict):
    n_folds: int = Field(default=5, ge=2)
    mode: AuxMode = "scratch"
    finetune_layers: int = Field(default=1, ge=1, description="Number of trailing layers re-initialized and trained")
    finetune_epochs: Optional[int] = Field(default=None, ge=0, description="Defaults to aux_train_cfg.epochs")
    finetune_patience: int = Field(default=5, ge=0)
    gamma: float = Field(default=0.0, ge=0.0, le=1.0)
    aux_train_cfg: TrainConfig = Field(default_factory=TrainConfig)
    seed: int = 0


class ToyGaussianConfig(_Strict):
    """Three-type Gaussian mixture: regular, irregular (wider) and mislabeled samples."""

    num_classes: int = 3
    dim: int = Field(default=10, gt=0)
    delta_mu: float = Field(default=1.0, gt=0)
    sigma_regular: float = Field(default=0.5, gt=0)
    sigma_irregular: float = Field(default=1.5, gt=0)
    frac_regular: float = Field(default=0.70, ge=0, le=1)
    frac_irregular: float = Field(default=0.15, ge=0, le=1)
    frac_mislabeled: float = Field(default=0.15, ge=0, le=1)
    n_samples: int = Field(default=600, gt=0)
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "ToyGaussianConfig":
        total = self.frac_regular + self.frac_irregular + self.frac_mislabeled
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"sample-type fractions must sum to 1, got {total}")
        if self.sigma_irregular <= self.sigma_regular:
            raise ValueError("sigma_irregular must exceed sigma_regular")
        return self


class ToyRegressionConfig(_Strict):
    dim: int = Field(default=5, gt=0)
    n_samples: int = Field(default=400, gt=0)
    noise_std: float = Field(default=0.1, ge=0)
    seed: int = 0


class DatasetSpec(_Strict):
    kind: Literal["toy_gaussian", "toy_regression", "csv"] = "toy_gaussian"
    toy_gaussian: ToyGaussianConfig = Field(default_factory=ToyGaussianConfig)
    toy_regression: ToyRegressionConfig = Field(default_factory=ToyRegressionConfig)
    csv_path: Optional[Path] = None
    test_csv_path: Optional[Path] = None
    target_column: str = "target"
    task: TaskKind = "classification"
    num_classes: Optional[int] = Field(default=None, ge=2)
    train_frac: float = Field(default=0.8, gt=0, le=1)
    test_frac: float = Field(default=0.2, gt=0, lt=1, description="CSV only: test share held out when no test file is given")
    n_test: int = Field(default=1000, gt=0)
    split_seed: int = 0

    @model_validator(mode="after")
    def _csv_needs_path(self) -> "DatasetSpec":
        if self.kind == "csv" and self.csv_path is None:
            raise ValueError("dataset.kind='csv' requires dataset.csv_path")
        return self


class NoiseSpec(_Strict):
    """Training-set corruption; validation and test stay clean."""

    label_flip_percent: float = Field(default=0.0, ge=0, le=100)
    skew_alpha: Optional[float] = Field(default=None, ge=0, le=3)
    skew_scale: float = Field(default=1.0, gt=0)
    seed: int = 0


class ModelSpec(_Strict):
    hidden_dims: list[int] = Field(default_factory=lambda: [64])

    @field_validator("hidden_dims")
    @classmethod
    def _positive(cls, value: list[int]) -> list[int]:
        if any(d <= 0 for d in value):
            raise ValueError("hidden_dims must be positive")
        return value


class PropositionSpec(_Strict):
    """Finite-input lookup-table instance for the flood-minimizer check."""

    n_points: int = Field(default=8, ge=2)
    num_classes: int = Field(default=2, ge=2)
    noise_rate: float = Field(default=0.25, ge=0, lt=1)
    samples_per_point: int = Field(default=1, ge=1)
    grid_size: int = Field(default=2001, ge=11)


class AblationSpec(_Strict):
    """Fine-tune vs scratch auxiliary comparison; ``masks`` lists trailing-layer counts."""

    masks: list[int] = Field(default_factory=lambda: [1])
    gamma: float = Field(default=0.5, ge=0.0, le=1.0)


class MotivationSpec(_Strict):
    epochs: int = Field(default=200, gt=0)
    hidden_dims: list[int] = Field(default_factory=lambda: [128])


class ExperimentConfig(_Strict):
    name: str = "experiment"
    dataset: DatasetSpec = Field(default_factory=DatasetSpec)
    model: ModelSpec = Field(default_factory=ModelSpec)
    train: TrainConfig = Field(default_factory=TrainConfig)
    methods: list[MethodSpec] = Field(
        default_factory=lambda: [MethodSpec(name="unregularized")]
    )
    aux: Optional[AuxConfig] = None
    flood_table_path: Optional[Path] = None
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    metrics: Optional[list[MetricName]] = None
    out_dir: Path = Path("runs")
    seeds: list[int] = Field(default_factory=lambda: [0])
    workers: int = Field(default=1, ge=1)
    proposition: PropositionSpec = Field(default_factory=PropositionSpec)
    ablation: AblationSpec = Field(default_factory=AblationSpec)
    motivation: MotivationSpec = Field(default_factory=MotivationSpec)

    @model_validator(mode="after")
    def _cross_field(self) -> "ExperimentConfig":
        if not self.seeds:
            raise ValueError("seeds must not be empty")
        names = [m.name for m in self.methods]
        if len(set(names)) != len(names):
            raise ValueError(f"method names must be unique: {names}")
        for method in self.methods:
            if method.flood.variant != "adaflood":
                continue
            if self.aux is None and self.flood_table_path is None:
                raise ValueError(
                    f"method {method.name!r} uses adaflood: provide an 'aux' section or 'flood_table_path'"
                )
            if method.grid and self.aux is None:
                raise ValueError(f"method {method.name!r}: a gamma sweep needs the 'aux' section")
        if self.dataset.kind == "toy_regression" or (self.dataset.kind == "csv" and self.dataset.task == "regression"):
            if self.noise.label_flip_percent > 0:
                raise ValueError("label_flip_percent applies to classification datasets only")
        elif self.noise.skew_alpha is not None:
            raise ValueError("skew noise applies to regression datasets only")
        return self

    @property
    def task(self) -> TaskKind:
        if self.dataset.kind == "toy_gaussian":
            return "classification"
        if self.dataset.kind == "toy_regression":
            return "regression"
        return self.dataset.task

    def resolved_metrics(self) -> list[str]:
        if self.metrics:
            return list(self.metrics)
        if self.task == "classification":
            return ["accuracy", "nll", "ece"]
        return ["mse", "mae", "r2"]
