"""Deterministic random streams.

Every randomized routine in the package draws from a counter-based Philox
generator keyed by an integer seed plus a structural path (module tag,
class index, attempt number, ...). Streams with different paths are
independent, and the same (seed, path) always reproduces the same draws,
which is what makes command-line reruns byte-identical.
"""
from __future__ import annotations

import numpy as np

# Module tags used as the first path component. Arbitrary but fixed.
TAG_GENERATE = 1
TAG_FAMILY = 2
TAG_CARVE = 3
TAG_PRUNE = 4
TAG_SURGERY = 5
TAG_WALKS = 6


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return a Philox generator for the given seed and structural path."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
