"""FloodTable: immutable per-sample flood levels with CSV + JSON sidecar persistence."""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..errors import ConfigError, FloodTableLookupError, MissingArtifactError, SchemaError
from ..jsonio import read_json, write_json

HISTOGRAM_EDGES = (0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, float("inf"))


class FloodTableProvenance(BaseModel):
    """How a table was produced (stored in the JSON sidecar)."""

    n_folds: Optional[int] = None
    mode: Optional[str] = None
    gamma: Optional[float] = None
    seed: Optional[int] = None
    aux_checkpoint_hashes: list[str] = Field(default_factory=list)
    source: str = "aux_pipeline"

    model_config = {"frozen": True}


@dataclass(frozen=True)
class FloodTable:
    """Sample ID -> theta_i, fixed for the whole main-model training.

    Arrays are sorted by sample ID and flagged read-only.
    """

    ids: np.ndarray
    theta: np.ndarray
    created_by: FloodTableProvenance = field(default_factory=FloodTableProvenance)

    def __post_init__(self) -> None:
        ids = np.asarray(self.ids, dtype=np.int64).reshape(-1)
        theta = np.asarray(self.theta, dtype=np.float64).reshape(-1)
        if ids.size != theta.size:
            raise ConfigError("flood table needs one theta per sample ID")
        order = np.argsort(ids, kind="stable")
        ids, theta = ids[order].copy(), theta[order].copy()
        if ids.size and np.any(ids[1:] == ids[:-1]):
            raise ConfigError("flood table sample IDs must be unique")
        if not np.all(np.isfinite(theta)):
            raise ConfigError("flood levels must be finite")
        if np.any(theta < 0):
            raise ConfigError("flood levels must be nonnegative")
        ids.setflags(write=False)
        theta.setflags(write=False)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, float], created_by: Optional[FloodTableProvenance] = None) -> "FloodTable":
        ids = np.fromiter(mapping.keys(), dtype=np.int64, count=len(mapping))
        theta = np.fromiter(mapping.values(), dtype=np.float64, count=len(mapping))
        return cls(ids, theta, created_by or FloodTableProvenance())

    @classmethod
    def constant(cls, ids: Sequence[int], value: float, *, source: str = "constant") -> "FloodTable":
        arr = np.asarray(ids, dtype=np.int64)
        return cls(arr, np.full(arr.size, float(value)), FloodTableProvenance(source=source))

    def __len__(self) -> int:
        return int(self.ids.size)

    def lookup(self, sample_ids: Sequence[int]) -> np.ndarray:
        """Flood levels aligned with ``sample_ids``.

        Raises:
            FloodTableLookupError: any ID missing from the table
        """
        query = np.asarray(sample_ids, dtype=np.int64).reshape(-1)
        pos = np.searchsorted(self.ids, query)
        pos_clipped = np.minimum(pos, max(self.ids.size - 1, 0))
        found = (pos < self.ids.size) & (self.ids[pos_clipped] == query) if self.ids.size else np.zeros(query.size, bool)
        if not np.all(found):
            missing = query[~found][:5].tolist()
            raise FloodTableLookupError(f"no flood level for sample IDs {missing}")
        return self.theta[pos_clipped]

    def as_dict(self) -> dict[int, float]:
        return {int(i): float(t) for i, t in zip(self.ids, self.theta)}

    def content_hash(self) -> str:
        """SHA-256 over the CSV serialization; stable across save/load."""
        return hashlib.sha256(self.to_csv_text().encode("utf-8")).hexdigest()

    def to_csv_text(self) -> str:
        lines = ["sample_id,theta"]
        lines.extend(f"{int(i)},{float(t)!r}" for i, t in zip(self.ids, self.theta))
        return "\n".join(lines) + "\n"

    def describe(self) -> dict:
        """Dispersion summary of theta: moments, quantiles and a fixed-edge histogram."""
        if len(self) == 0:
            return {"count": 0}
        q = np.quantile(self.theta, [0.1, 0.25, 0.5, 0.75, 0.9])
        counts, _ = np.histogram(self.theta, bins=np.array(HISTOGRAM_EDGES))
        return {
            "count": len(self),
            "mean": float(np.mean(self.theta)),
            "std": float(np.std(self.theta)),
            "min": float(np.min(self.theta)),
            "max": float(np.max(self.theta)),
            "quantiles": {"p10": float(q[0]), "p25": float(q[1]), "p50": float(q[2]), "p75": float(q[3]), "p90": float(q[4])},
            "histogram": {
                "edges": [e if np.isfinite(e) else "inf" for e in HISTOGRAM_EDGES],
                "counts": [int(c) for c in counts],
            },
        }


def sidecar_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".json")


def save_flood_table(table: FloodTable, csv_path: Path) -> Path:
    """Write ``sample_id,theta`` CSV plus a JSON sidecar with provenance and dispersion."""
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(table.to_csv_text(), encoding="utf-8")
    write_json(
        sidecar_path(csv_path),
        {
            "created_by": table.created_by.model_dump(mode="json"),
            "content_hash": table.content_hash(),
            "dispersion": table.describe(),
        },
    )
    return csv_path


def load_flood_table(csv_path: Path) -> FloodTable:
    if not csv_path.exists():
        raise MissingArtifactError(f"flood table not found: {csv_path} (run `floodlib train-aux` first)")
    ids: list[int] = []
    theta: list[float] = []
    with open(csv_path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != ["sample_id", "theta"]:
            raise SchemaError(f"{csv_path}: expected header 'sample_id,theta', got {header}")
        for row_number, row in enumerate(reader, start=1):
            if not row:
                continue
            try:
                ids.append(int(row[0]))
                theta.append(float(row[1]))
            except (ValueError, IndexError) as e:
                raise SchemaError(f"{csv_path}: bad row {row_number}: {row}") from e
    provenance = FloodTableProvenance(source="csv")
    sidecar = sidecar_path(csv_path)
    if sidecar.exists():
        provenance = FloodTableProvenance(**read_json(sidecar).get("created_by", {}))
    return FloodTable(np.asarray(ids, dtype=np.int64), np.asarray(theta, dtype=np.float64), provenance)
