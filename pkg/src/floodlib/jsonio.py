"""Stable JSON writing: sorted keys, fixed indent, trailing newline."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any


def dumps_stable(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(path: Path, data: Any) -> Path:
    """Write ``data`` as stable-key-ordered JSON, creating parent directories."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_stable(data), encoding="utf-8")
    return path


def read_json(path: Path) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(65536), b""):
            h.update(block)
    return h.hexdigest()
