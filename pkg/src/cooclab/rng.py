"""Committed 64-bit random source and seed derivation.

Every random draw in the package comes from SplitMix64 so that fixtures are
reproducible across platforms and across independent implementations:

    state_k = seed + k * 0x9E3779B97F4A7C15          (mod 2**64, k = 1, 2, ...)
    z = state_k
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9         (mod 2**64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB         (mod 2**64)
    z = z ^ (z >> 31)
    u_k = (z >> 11) * 2**-53                          (uniform double in [0, 1))

Because output k is a pure function of (seed, k), streams can be generated
in vectorized blocks without carrying state.

Seeds for independent trials are derived with :func:`mix_seed`, which folds a
sequence of 64-bit words into one::

    h = 0
    for w in words:
        h = finalize(h ^ finalize(w + GAMMA))

where ``finalize`` is the SplitMix64 output function above applied to its
argument directly (no counter increment).
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / 9007199254740992.0


def finalize(z: int) -> int:
    """SplitMix64 output function on a Python int (reference path)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def mix_seed(*words: int) -> int:
    """Fold integers into a single 64-bit seed (order sensitive)."""
    h = 0
    for w in words:
        h = finalize(h ^ finalize((int(w) + GAMMA) & MASK64))
    return h


class SplitMix64:
    """Scalar reference generator; slow, used by tests and small draws."""

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return finalize(self.state)

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * INV_2_53


def _finalize_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MUL1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MUL2)
    return z ^ (z >> np.uint64(31))


def uniform_block(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Draws ``offset+1 .. offset+count`` of the stream for ``seed``."""
    k = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        state = np.uint64(int(seed) & MASK64) + k * np.uint64(GAMMA)
        z = _finalize_array(state)
    return (z >> np.uint64(11)).astype(np.float64) * INV_2_53


def content_hash(arr: np.ndarray) -> str:
    """Hex SHA-256 of a float64 C-ordered little-endian array plus its shape."""
    a = np.ascontiguousarray(arr, dtype="<f8")
    h = hashlib.sha256()
    h.update(repr(a.shape).encode())
    h.update(a.tobytes())
    return h.hexdigest()


def hash_word(hexdigest: str) -> int:
    """First 64 bits of a hex digest, as an integer seed word."""
    return int(hexdigest[:16], 16)
