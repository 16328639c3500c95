"""Deterministic seed derivation for folds, sweep points and runs."""

from __future__ import annotations

import numpy as np


def derive_seed(base: int, *keys: int) -> int:
    """Derive an independent 32-bit seed from a base seed and integer keys."""
    seq = np.random.SeedSequence([int(base) & 0xFFFFFFFF, *[int(k) & 0xFFFFFFFF for k in keys]])
    return int(seq.generate_state(1)[0])


def make_rng(base: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(base) & 0xFFFFFFFF, *[int(k) & 0xFFFFFFFF for k in keys]]))
