"""Deterministic random-stream derivation.

Every stochastic component draws from a generator keyed by (master seed,
role tag, *indices). Streams are independent of execution order and thread
count, so corpora and experiment reports reproduce bit-for-bit.
"""

from __future__ import annotations

import numpy as np

# Role tags namespace the spawn keys so unrelated components never share
# a stream even when their indices coincide.
ROLE_GRAPH = 0
ROLE_FIRST_ORDER = 1
ROLE_SECOND_ORDER = 2
ROLE_QUANTUM = 3
ROLE_EMBED = 4
ROLE_CLUSTER = 5
ROLE_EXPERIMENT = 6


def seed_sequence(seed: int, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """Generator for the stream identified by (seed, *key)."""
    return np.random.default_rng(seed_sequence(seed, *key))


def derive_seed(seed: int, *key: int) -> int:
    """Collapse a stream identity into a plain integer seed.

    Used where a sub-component wants a recordable scalar seed (e.g. in an
    echoed effective config) rather than a live generator.
    """
    return int(seed_sequence(seed, *key).generate_state(1, np.uint64)[0])
