"""Shared helpers: RNG normalization and per-trial seed derivation."""

import numpy as np


def as_rng(seed=None) -> np.random.Generator:
    """Accept a Generator, an int seed, or None; return a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent per-trial generator, derived in counter mode.

    The derivation is bit-exact: numpy SeedSequence(seed, spawn_key=(trial,)).
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))
