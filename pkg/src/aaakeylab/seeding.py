"""Deterministic RNG streams derived from a single integer seed."""

from __future__ import annotations

import numpy as np

# Purpose constants keep independent experiment stages on disjoint streams.
STREAM_SOURCE = 0
STREAM_INTERCEPT = 1
STREAM_MC = 2
STREAM_EXTRACTOR = 3
STREAM_CHECKS = 4


def rng_from(seed, *stream: int) -> np.random.Generator:
    """Return a counter-based generator for a (seed, stream...) pair.

    The same (seed, stream) inputs always yield the same stream, and
    distinct stream tuples are statistically independent.  An existing
    Generator passes through unchanged so callers can chain.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(seq))
