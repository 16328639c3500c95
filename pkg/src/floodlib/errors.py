"""Exception hierarchy for floodlib.

The CLI maps ``ConfigError`` and ``SchemaError`` to exit code 2 and every other
``FloodlibError`` to exit code 3.
"""

from __future__ import annotations

from typing import Any, Optional


class FloodlibError(Exception):
    """Base class for all floodlib errors."""


class ConfigError(FloodlibError, ValueError):
    """Invalid configuration or violated precondition."""


class SchemaError(FloodlibError, ValueError):
    """Input file does not match the expected schema (e.g. missing column)."""


class ShapeError(FloodlibError, ValueError):
    """Array dimensions do not match the model or each other."""


class NumericError(FloodlibError, ArithmeticError):
    """Non-finite values where finite values are required."""


class TrainingDivergedError(FloodlibError, RuntimeError):
    """Training produced a non-finite loss.

    Carries the epoch log up to the failure so callers can persist it.
    """

    def __init__(self, message: str, *, epoch: int, log: Any = None, fold_index: Optional[int] = None):
        super().__init__(message)
        self.epoch = epoch
        self.log = log
        self.fold_index = fold_index


class PipelineError(FloodlibError, RuntimeError):
    """Auxiliary pipeline failure (fold/model misalignment, failed fold)."""

    def __init__(self, message: str, *, fold_index: Optional[int] = None):
        super().__init__(message)
        self.fold_index = fold_index


class FloodTableLookupError(FloodlibError, KeyError):
    """A batch sample has no flood level in the table."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class DegenerateProbabilityError(FloodlibError, ValueError):
    """Auxiliary probability of the true class is 0 with gamma = 0 (infinite flood level)."""


class TaskMismatchError(FloodlibError, TypeError):
    """Operation applied to the wrong task kind (classification vs regression)."""


class CsvParseError(FloodlibError, ValueError):
    """Malformed CSV cell."""

    def __init__(self, message: str, *, row: int, column: Optional[str] = None):
        super().__init__(message)
        self.row = row
        self.column = column


class ValidationError(FloodlibError, ValueError):
    """Two artifacts that should align do not (e.g. flood tables over different IDs)."""


class UndefinedMetricError(FloodlibError, ValueError):
    """Metric is mathematically undefined for the given inputs."""


class PremiseError(FloodlibError, ValueError):
    """Proposition check configuration violates the overparameterized premise."""


class MissingArtifactError(FloodlibError, FileNotFoundError):
    """A required artifact (flood table, checkpoint) has not been produced yet."""
