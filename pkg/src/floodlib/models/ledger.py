"""Pydantic model for run ledger events."""

from datetime import datetime
from typing import Literal

from pydantic import BaseModel, Field

LedgerEventType = Literal[
    "DATA_GENERATED",
    "AUX_BASE_TRAINED",
    "AUX_FOLD_TRAINED",
    "FLOOD_TABLE_WRITTEN",
    "TRAIN_RUN_COMPLETED",
    "TRAIN_RUN_FAILED",
    "SWEEP_POINT_SELECTED",
    "EVALUATION_WRITTEN",
    "CALIBRATION_WRITTEN",
    "PROPOSITION_CHECKED",
    "ABLATION_COMPLETED",
    "MOTIVATION_COMPLETED",
]


class LedgerEvent(BaseModel):
    """Append-only ledger event record.

    Written as JSONL to <out>/<experiment>/ledger.jsonl.
    Never mutate or delete; only append.
    """

    event_id: str = Field(description="Unique event identifier (uuid4)")
    run_id: str = Field(description="CLI invocation identifier (uuid4)")
    ts: datetime = Field(description="Event timestamp (ISO8601 UTC)")
    event_type: LedgerEventType = Field(description="Event type")
    payload: dict = Field(default_factory=dict, description="Event-specific data")

    model_config = {"frozen": True}
