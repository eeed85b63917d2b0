"""Seeded random streams.

All randomness goes through :func:`stream`, which derives an independent
Philox (counter-based) generator from an integer seed and a tuple of name
parts. Deriving by name rather than by draw order keeps results identical
whether work runs serially or in a worker pool.
"""
import hashlib

import numpy as np


def _key(seed, names):
    h = hashlib.blake2b(digest_size=16)
    h.update(str(int(seed)).encode())
    for name in names:
        h.update(b"\x1f")
        h.update(str(name).encode())
    return int.from_bytes(h.digest(), "little")


def stream(seed, *names):
    """Return a ``numpy.random.Generator`` for ``(seed, *names)``."""
    return np.random.Generator(np.random.Philox(key=_key(seed, names)))


def child_seed(seed, *names):
    """Derive a 63-bit integer seed for a named sub-task."""
    return _key(seed, names) & ((1 << 63) - 1)
