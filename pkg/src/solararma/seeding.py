"""Deterministic random-stream derivation.

Every stochastic component takes its randomness from a single master seed.
Substreams are derived through ``numpy.random.SeedSequence`` spawn keys, so
the stream used by one unit of work (one scenario row, one grid cell) does
not depend on scheduling or on how many other units ran before it.
"""

from __future__ import annotations

import numpy as np

SeedLike = "int | np.random.SeedSequence | np.random.Generator | None"


def child_sequence(seed, *key: int) -> np.random.SeedSequence:
    """Derive the child SeedSequence of ``seed`` identified by ``key``.

    The same (seed, key) pair always yields the same stream, independent of
    any other children derived from the same seed.
    """
    if isinstance(seed, np.random.SeedSequence):
        base = seed.entropy
    else:
        base = seed
    return np.random.SeedSequence(entropy=base, spawn_key=tuple(int(k) for k in key))


def generator(seed) -> np.random.Generator:
    """A ``numpy.random.Generator`` for ``seed`` (int, SeedSequence, Generator or None)."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def row_generators(seed, n: int) -> list[np.random.Generator]:
    """One independent generator per row, derived from the master ``seed``."""
    return [generator(child_sequence(seed, i)) for i in range(n)]
