"""Experiment event log: one JSON object per line in ``ledger.jsonl``."""

import json
import threading
import uuid
from collections import deque
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

from rich.console import Console

from .models.ledger import LedgerEvent, LedgerEventType

console = Console(stderr=True)


class LedgerWriter:
    """Appends events for one CLI invocation (one ``run_id``).

    The file is opened in append mode for every event and never rewritten.
    Fold and seed workers may share a writer; appends are serialized.
    """

    def __init__(self, ledger_path: Path, run_id: Optional[str] = None):
        self.ledger_path = ledger_path
        self.run_id = run_id or str(uuid.uuid4())
        self._lock = threading.Lock()

    def append_event(self, event_type: LedgerEventType, payload: dict) -> LedgerEvent:
        event = LedgerEvent(
            event_id=str(uuid.uuid4()),
            run_id=self.run_id,
            ts=datetime.now(timezone.utc),
            event_type=event_type,
            payload=payload,
        )
        line = json.dumps(event.model_dump(mode="json"), sort_keys=True)
        with self._lock:
            self.ledger_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.ledger_path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
        return event


def _parse(lines: Iterable[str]) -> tuple[list[LedgerEvent], int]:
    events: list[LedgerEvent] = []
    skipped = 0
    for raw in lines:
        raw = raw.strip()
        if not raw:
            continue
        try:
            events.append(LedgerEvent(**json.loads(raw)))
        except (json.JSONDecodeError, ValueError) as e:
            skipped += 1
            console.print(f"[yellow]Warning: Skipping malformed ledger line: {e}[/yellow]")
    return events, skipped


def read_ledger_tail(
    ledger_path: Path,
    n: int = 20,
    event_type: Optional[LedgerEventType] = None,
) -> list[LedgerEvent]:
    """Return the last ``n`` parseable events, oldest first.

    With ``event_type`` the whole file is scanned and the last ``n`` events
    of that type are returned. Malformed lines (bad JSON, unknown event
    types) are skipped with a warning.
    """
    if not ledger_path.exists() or n <= 0:
        return []

    with open(ledger_path, "r", encoding="utf-8") as f:
        lines = list(f) if event_type is not None else deque(f, maxlen=n)

    events, skipped = _parse(lines)
    if skipped:
        console.print(f"[yellow]Skipped {skipped} malformed ledger line(s)[/yellow]")
    if event_type is not None:
        events = [e for e in events if e.event_type == event_type][-n:]
    return events
