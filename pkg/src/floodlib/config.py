"""Configuration loading for floodlib.

Run-level settings (output directory, worker count) resolve with this
precedence:

1. CLI option
2. Environment variable (FLOODLIB_OUT_DIR, FLOODLIB_WORKERS)
3. Repo-local .floodlib/config.toml ([floodlib] out_dir / workers)
4. The experiment config JSON
5. Built-in defaults
"""

import json
import os
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError as PydanticValidationError

from .errors import ConfigError
from .models.config import ExperimentConfig

try:
    import tomllib  # Python 3.11+
except ImportError:
    import tomli as tomllib  # Python < 3.11


def _find_repo_root(start_dir: Path) -> Path:
    """Find repository root by walking upward looking for .git or pyproject.toml."""
    current_dir = start_dir

    while True:
        if (current_dir / ".git").exists() or (current_dir / "pyproject.toml").exists():
            return current_dir

        parent_dir = current_dir.parent
        if parent_dir == current_dir:
            return start_dir

        current_dir = parent_dir


def _load_repo_config_data(repo_root: Path) -> Optional[dict]:
    """Load repo config data from .floodlib/config.toml if it exists."""
    config_file = repo_root / ".floodlib" / "config.toml"

    if not config_file.exists():
        return None

    try:
        with open(config_file, "rb") as f:
            return tomllib.load(f)
    except Exception:
        # Malformed repo config is ignored
        return None


def _repo_section(data: Optional[dict]) -> dict:
    if not data:
        return {}
    section = data.get("floodlib")
    return section if isinstance(section, dict) else {}


def _as_int(value: Any, *, name: str) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"Invalid config: {name} must be an int")
    if isinstance(value, int):
        return value
    if isinstance(value, str) and value.strip().isdigit():
        return int(value.strip())
    raise ConfigError(f"Invalid config: {name} must be an int")


def _parse_override(raw: str) -> tuple[str, Any]:
    if "=" not in raw:
        raise ConfigError(f"Invalid override {raw!r}: expected key=value")
    key, value = raw.split("=", 1)
    key = key.strip()
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def load_experiment_config(
    config_path: Path,
    *,
    seed: Optional[int] = None,
    out_dir: Optional[str] = None,
    workers: Optional[int] = None,
    overrides: Optional[list[str]] = None,
) -> ExperimentConfig:
    """Load and validate an experiment JSON document, applying overrides.

    Raises:
        ConfigError: unreadable file, invalid JSON, or schema violations
    """
    if not config_path.exists():
        raise ConfigError(f"Config file does not exist: {config_path}")
    try:
        data = json.loads(config_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config is not valid JSON ({config_path}): {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config must be a JSON object: {config_path}")

    for raw in overrides or []:
        key, value = _parse_override(raw)
        data[key] = value

    repo = _repo_section(_load_repo_config_data(_find_repo_root(Path.cwd())))
    if "out_dir" in repo:
        data["out_dir"] = str(repo["out_dir"])
    if "workers" in repo:
        data["workers"] = _as_int(repo["workers"], name="[floodlib].workers")

    env_out = os.environ.get("FLOODLIB_OUT_DIR")
    if env_out:
        data["out_dir"] = env_out
    env_workers = os.environ.get("FLOODLIB_WORKERS")
    if env_workers:
        data["workers"] = _as_int(env_workers, name="FLOODLIB_WORKERS")

    if out_dir is not None:
        data["out_dir"] = out_dir
    if workers is not None:
        data["workers"] = workers
    if seed is not None:
        data["seeds"] = [seed]

    try:
        cfg = ExperimentConfig(**data)
    except PydanticValidationError as e:
        raise ConfigError(f"Invalid experiment config {config_path}:\n{e}") from e

    # Relative data paths resolve against the config file's directory.
    base = config_path.parent
    dataset = cfg.dataset
    updates: dict[str, Any] = {}
    if dataset.csv_path is not None and not dataset.csv_path.is_absolute():
        updates["csv_path"] = (base / dataset.csv_path).resolve()
    if dataset.test_csv_path is not None and not dataset.test_csv_path.is_absolute():
        updates["test_csv_path"] = (base / dataset.test_csv_path).resolve()
    if updates:
        cfg = cfg.model_copy(update={"dataset": dataset.model_copy(update=updates)})
    if cfg.flood_table_path is not None and not cfg.flood_table_path.is_absolute():
        cfg = cfg.model_copy(update={"flood_table_path": (base / cfg.flood_table_path).resolve()})
    return cfg


def config_snapshot(cfg: ExperimentConfig) -> dict:
    """JSON-ready snapshot embedded in every result file."""
    return cfg.model_dump(mode="json")
