"""Seed derivation.

Every random stream in the package is keyed by ``(master seed, *keys)`` through
``numpy.random.SeedSequence`` so that per-trial and per-permutation streams can
be created independently of scheduling order.
"""

from __future__ import annotations

import numpy as np

# stream tags
CENTERS = 1
FOLDS = 2
PERMUTATION = 3
TRIAL = 4
DATA = 5
DIRECTION = 6


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) % (1 << 64), *keys]))


def derive_seed(seed: int, *keys: int) -> int:
    """Return a 32-bit integer seed derived from ``seed`` and ``keys``."""
    return int(np.random.SeedSequence([int(seed) % (1 << 64), *keys]).generate_state(1)[0])
