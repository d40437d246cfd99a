"""Seeded, splittable random streams.

Every random draw in the package comes from a generator keyed by
``(seed, tag, *indices)`` via :class:`numpy.random.SeedSequence` spawn keys, so
the stream used for e.g. device 17 / read 3 does not depend on how many other
streams were created before it or on which thread consumes it.
"""
from __future__ import annotations

import numpy as np

SEED_MAX = 2**64 - 1

# stream tags; one per kind of draw
RESPONSE = 1
NOISE = 2
PAIR_X = 3
PAIR_E = 4
POP_TRUTH = 5
POP_READ = 6
AUTH_GAME = 7
MAC_GAME = 8
AVALANCHE = 9
NOISE_PROP = 10
DEVICES = 11
ORACLE = 12


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, tag: int, *indices: int) -> np.random.Generator:
    """Independent generator for the stream addressed by ``(seed, tag, *indices)``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(tag, *map(int, indices)))
    return np.random.Generator(np.random.PCG64(ss))
