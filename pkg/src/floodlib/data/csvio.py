"""CSV ingestion and export for datasets.

Files are UTF-8 with a header row. Optional columns ``sample_id`` and
``__noise_flag`` are recognized; every other non-target column is a numeric
feature.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import ConfigError, CsvParseError, SchemaError
from .dataset import Dataset, Task

ID_COLUMN = "sample_id"
FLAG_COLUMN = "__noise_flag"


def _parse_float(raw: str, *, row: int, column: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise CsvParseError(f"row {row}, column {column!r}: non-numeric value {raw!r}", row=row, column=column) from None
    if not math.isfinite(value):
        raise CsvParseError(f"row {row}, column {column!r}: non-finite value {raw!r}", row=row, column=column)
    return value


def _read_text(path: Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError(f"CSV file does not exist: {path}") from None
    except UnicodeDecodeError as e:
        raise SchemaError(f"{path}: not valid UTF-8 (byte {e.start}: {e.reason})") from None
    except OSError as e:
        raise SchemaError(f"{path}: cannot read CSV ({e.strerror or e})") from None


def load_csv(
    path: Path,
    target_column: str,
    task: str,
    num_classes: Optional[int] = None,
) -> Dataset:
    """Parse a CSV into a Dataset.

    Rows are numbered from 1 (the first data row after the header) in errors.
    For classification without ``num_classes`` the class count is inferred as
    max(label) + 1.

    Raises:
        ConfigError: the file does not exist
        SchemaError: unreadable or non-UTF-8 file, missing header or target column
        CsvParseError: non-numeric cell or wrong field count
    """
    with io.StringIO(_read_text(path), newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        if target_column not in header:
            raise SchemaError(f"{path}: target column {target_column!r} not found in header {header}")

        target_pos = header.index(target_column)
        id_pos = header.index(ID_COLUMN) if ID_COLUMN in header else None
        flag_pos = header.index(FLAG_COLUMN) if FLAG_COLUMN in header else None
        feature_pos = [i for i in range(len(header)) if i not in {target_pos, id_pos, flag_pos}]

        features: list[list[float]] = []
        targets: list[float] = []
        ids: list[int] = []
        flags: list[bool] = []
        for row_number, record in enumerate(reader, start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) != len(header):
                raise CsvParseError(
                    f"row {row_number}: expected {len(header)} fields, got {len(record)}", row=row_number
                )
            features.append([_parse_float(record[i], row=row_number, column=header[i]) for i in feature_pos])
            targets.append(_parse_float(record[target_pos], row=row_number, column=target_column))
            if id_pos is not None:
                ids.append(int(_parse_float(record[id_pos], row=row_number, column=ID_COLUMN)))
            if flag_pos is not None:
                flags.append(record[flag_pos].strip().lower() in {"1", "true", "yes"})

    x = np.asarray(features, dtype=np.float64).reshape(len(features), len(feature_pos))
    if task == "classification":
        y = np.asarray(targets)
        if np.any(y != np.round(y)):
            bad = int(np.flatnonzero(y != np.round(y))[0]) + 1
            raise CsvParseError(f"row {bad}, column {target_column!r}: class label must be an integer", row=bad, column=target_column)
        k = num_classes if num_classes is not None else int(y.max()) + 1 if y.size else 2
        resolved = Task.classification(max(k, 2))
    else:
        resolved = Task.regression()

    return Dataset.build(
        x,
        targets,
        resolved,
        sample_ids=ids or None,
        noise_flags=flags or None,
        feature_names=tuple(header[i] for i in feature_pos),
        target_name=target_column,
    )


def export_csv(dataset: Dataset, path: Path) -> Path:
    """Write ``sample_id, features..., target, __noise_flag`` with exact float reprs."""
    names = dataset.feature_names or tuple(f"x{i}" for i in range(dataset.dim))
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([ID_COLUMN, *names, dataset.target_name, FLAG_COLUMN])
        for i in range(len(dataset)):
            label = int(dataset.labels[i]) if dataset.task.is_classification else repr(float(dataset.labels[i]))
            writer.writerow(
                [
                    int(dataset.sample_ids[i]),
                    *[repr(float(v)) for v in dataset.features[i]],
                    label,
                    int(bool(dataset.noise_flags[i])),
                ]
            )
    return path
