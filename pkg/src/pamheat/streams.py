"""Counter-based random number streams for reproducible parallel Monte Carlo.

Each logical stream is keyed by (seed, stream index) through a Philox
counter-based generator, so replicas and paths draw from statistically
independent streams whose output does not depend on scheduling order or
worker count.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream", "substream"]

_MASK64 = (1 << 64) - 1


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for logical stream `index` under `seed`."""
    key = np.array([seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def substream(seed: int, index: int, step: int) -> np.random.Generator:
    """Random-access stream positioned at a fixed offset for `step`.

    Each step owns a disjoint 2^64 block of the counter space, so draws
    for step s are identical no matter which steps were generated before.
    """
    gen = stream(seed, index)
    gen.bit_generator.advance(step << 64)
    return gen
