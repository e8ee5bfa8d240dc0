"""Deterministic random-stream derivation.

Every stochastic component draws from its own ``numpy.random.Generator``
derived from the single run seed plus a component tag (and optionally an
iteration index).  Re-running any component with the same (seed, tags)
reproduces its stream regardless of what other components consumed.
"""

from __future__ import annotations

import zlib

import numpy as np


def subseed(seed: int, *tags: str | int) -> np.random.SeedSequence:
    """Derive a child seed sequence from a master seed and component tags.

    String tags are hashed with crc32 so the derivation is stable across
    processes and Python versions.
    """
    entropy = [int(seed)]
    for tag in tags:
        if isinstance(tag, str):
            entropy.append(zlib.crc32(tag.encode("utf8")))
        else:
            entropy.append(int(tag))
    return np.random.SeedSequence(entropy)


def rng_for(seed: int, *tags: str | int) -> np.random.Generator:
    """Generator for one component stream; see :func:`subseed`."""
    return np.random.default_rng(subseed(seed, *tags))
