"""Splittable seeding: every consumer gets its own stream keyed by integers."""

from __future__ import annotations

import numpy as np

# stream tags, so that different consumers of one master seed never collide
TAG_SAMPLE = 0
TAG_SPLIT = 1
TAG_INIT = 2
TAG_SHUFFLE = 3
TAG_DROPOUT = 4
TAG_FOREST = 5
TAG_REPEAT = 6


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``; identical keys give identical streams."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, keys)]))


def derive_seed(seed: int, *keys: int) -> int:
    """A 63-bit integer seed for ``(seed, *keys)``, for handing to nested consumers."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
