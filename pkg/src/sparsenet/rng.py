"""Seeded random-number streams.

Every stochastic step in the package draws from a counter-based Philox
generator keyed by (seed, stream tags). Streams are independent, so parallel
workers produce the same numbers as a serial run regardless of scheduling.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def make_rng(*entropy: int) -> np.random.Generator:
    """Return a Philox generator keyed by the given integers.

    Negative entries (e.g. user-supplied 64-bit seeds) are mapped to their
    unsigned representation so any Python int is accepted.
    """
    if not entropy:
        raise ValueError("at least one entropy integer is required")
    key = [int(e) & _MASK64 for e in entropy]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def derive_seed(*entropy: int) -> int:
    """Deterministically derive a fresh 63-bit seed from entropy integers."""
    return int(make_rng(*entropy).integers(0, 1 << 63))
