"""Deterministic child seeds derived from a master seed."""

import numpy as np


def derive_seed(master: int, *path: int) -> int:
    """Mix ``master`` with an integer ``path`` into an independent 64-bit seed.

    The same inputs always give the same seed, and different paths give
    statistically independent streams (``numpy.random.SeedSequence``).
    """
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
