"""Model checkpoints: ``FLOODMLP1`` magic line followed by a JSON body.

The body holds layer_dims, head, seed and the flattened parameters in
row-major order (see ``MlpModel.flat_parameters``). Python's float repr
round-trips exactly, so save/load is lossless and byte-stable.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..errors import MissingArtifactError, SchemaError
from .mlp import MlpModel, init_mlp

MAGIC = "FLOODMLP1"


def dumps_checkpoint(model: MlpModel) -> bytes:
    body = {
        "head": model.head,
        "layer_dims": [int(d) for d in model.layer_dims],
        "params": [float(v) for v in model.flat_parameters()],
        "seed": int(model.seed),
    }
    return (MAGIC + "\n" + json.dumps(body, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def loads_checkpoint(blob: bytes) -> MlpModel:
    text = blob.decode("utf-8")
    magic, _, rest = text.partition("\n")
    if magic != MAGIC:
        raise SchemaError(f"not a floodlib checkpoint (magic {magic[:16]!r})")
    try:
        body = json.loads(rest)
        model = init_mlp(body["layer_dims"], body["head"], int(body["seed"]))
        model.set_flat_parameters(np.asarray(body["params"], dtype=np.float64))
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise SchemaError(f"corrupt checkpoint body: {e}") from e
    return model


def save_checkpoint(model: MlpModel, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps_checkpoint(model))
    return path


def load_checkpoint(path: Path, *, produced_by: str = "train") -> MlpModel:
    if not path.exists():
        raise MissingArtifactError(f"checkpoint not found: {path} (run `floodlib {produced_by}` first)")
    return loads_checkpoint(path.read_bytes())
