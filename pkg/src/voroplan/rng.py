"""Splittable random streams keyed by (seed, episode, role)."""

import numpy as np

# Stable role indices so a given (seed, episode, role) always maps to the same
# substream; paired solver comparisons rely on this.
SOLVER = 0
ENV = 1
FILTER = 2
TUNER = 3


def stream(seed, *key):
    """Independent generator for the given base seed and integer key path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)
