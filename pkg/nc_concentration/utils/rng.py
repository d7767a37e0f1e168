"""Counter-based random streams keyed by (seed, trial index)."""
from __future__ import annotations

import numpy as np

MAX_SEED = 2**64 - 1


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial; depends only on ``seed`` and ``trial``, never on scheduling."""
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(int(trial),))))


def named_stream(seed: int, *key: int) -> np.random.Generator:
    """Stream for auxiliary draws (coefficient matrices, support sampling) kept apart from trial streams."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(2**32 - 1, *map(int, key))))
    )
