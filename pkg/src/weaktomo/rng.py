"""Deterministic, seedable random number generation.

Every stochastic operation in the library takes an explicit integer seed and
builds a fresh PCG64 generator from it, so identical inputs always produce
identical outputs on every platform.  Composite simulations (one seed, many
independent sub-measurements) derive child seeds through
``numpy.random.SeedSequence`` spawn keys: child streams are statistically
independent and the derivation is itself deterministic.
"""

from __future__ import annotations

import numpy as np


def spawn_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream addressed by ``seed`` and a counter path.

    ``spawn_rng(s)`` is the root stream; ``spawn_rng(s, i, j)`` is the
    independent child stream for sub-task ``(i, j)``.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=path))


def derive_seed(seed: int, *path: int) -> int:
    """Deterministic child seed for sub-task ``path`` under a root seed.

    Used where an API expects a plain integer seed (e.g. a NoiseModel for a
    single matrix entry inside a larger simulation).
    """
    state = np.random.SeedSequence(seed, spawn_key=path).generate_state(2, np.uint64)
    return int(state[0] ^ (state[1] << 1)) & ((1 << 63) - 1)
