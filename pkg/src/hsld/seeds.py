"""Stable per-sample seed derivation.

Every stochastic output is keyed by ``(base_seed, tag, index)``.  The mix is
a chain of splitmix64 finalizers over the base seed, the FNV-1a hash of the
tag and the index, so it is identical on every platform and independent of
the order in which samples are produced::

    s = splitmix64(base_seed)
    s = splitmix64(s ^ fnv1a64(tag))
    s = splitmix64(s ^ index)
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * 0x100000001B3) & _MASK
    return h


def derive_seed(base_seed: int, tag: str, index: int) -> int:
    """Return the 64-bit seed of sample ``index`` in stream ``tag``."""
    s = splitmix64(base_seed & _MASK)
    s = splitmix64(s ^ fnv1a64(tag))
    return splitmix64(s ^ (index & _MASK))


def derive_rng(base_seed: int, tag: str, index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(base_seed, tag, index))
