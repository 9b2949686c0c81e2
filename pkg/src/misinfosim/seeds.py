"""Deterministic RNG substreams keyed by integer paths.

Every stochastic step in the package draws from a generator obtained here,
keyed by (master seed, entity index, ...). Streams are independent of each
other and of iteration order, which is what makes parallel and sequential
runs byte-identical.
"""

from __future__ import annotations

import numpy as np


def substream(*key: int) -> np.random.Generator:
    """Generator for an integer key path; stable across platforms."""
    if any(k < 0 for k in key):
        raise ValueError(f"substream keys must be non-negative, got {key}")
    return np.random.default_rng(np.random.SeedSequence(list(key)))


def derive_seed(*key: int) -> int:
    """Collapse a key path into a single 64-bit seed for configs that store one."""
    if any(k < 0 for k in key):
        raise ValueError(f"seed keys must be non-negative, got {key}")
    state = np.random.SeedSequence(list(key)).generate_state(2, np.uint64)
    return int(state[0])
