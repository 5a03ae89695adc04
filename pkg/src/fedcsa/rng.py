"""Deterministic randomness: every stochastic step draws from a Generator
seeded by a stable hash of (master seed, role labels). Re-running with the
same master seed reproduces every stream bit for bit, independent of
scheduling or call order.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, *parts: object) -> int:
    """Stable 64-bit child seed for the stream named by `parts`."""
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode())
    for part in parts:
        h.update(b"\x1f")
        h.update(str(part).encode())
    return int.from_bytes(h.digest()[:8], "big")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)
