"""Portable seeded random stream used by the noise attacks.

SplitMix64 (Steele, Lea & Flood 2014): state advances by the golden-ratio
increment and each output is the state passed through the xorshift-multiply
finaliser. Output ``i`` depends only on ``seed`` and ``i``, so whole blocks
are generated with wrapping uint64 arithmetic in numpy and the stream is
identical on every platform.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def splitmix64(seed: int, count: int, start: int = 0) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of the SplitMix64 stream for ``seed``."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK64) + idx * np.uint64(GOLDEN_GAMMA)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def splitmix64_scalar(seed: int, index: int) -> int:
    """Reference scalar evaluation of output ``index``; used to cross-check."""
    z = (seed + (index + 1) * GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary printable parts (BLAKE2b, 8 bytes)."""
    text = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "big")


class SeededRng:
    """Sequential view over a SplitMix64 stream."""

    algorithm = "splitmix64"

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        self._pos = 0

    def u64(self, n: int) -> np.ndarray:
        out = splitmix64(self.seed, n, self._pos)
        self._pos += n
        return out

    def uniform(self, n: int) -> np.ndarray:
        """Floats in [0, 1): top 53 bits of each draw scaled by 2**-53."""
        return (self.u64(n) >> np.uint64(11)).astype(np.float64) * (2.0**-53)

    def normal(self, n: int, mean: float = 0.0, std: float = 1.0) -> np.ndarray:
        """Box-Muller: each (u1, u2) pair yields r*cos and r*sin, interleaved."""
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        theta = 2.0 * math.pi * u[:, 1]
        z = np.stack([r * np.cos(theta), r * np.sin(theta)], axis=1).reshape(-1)[:n]
        return mean + std * z
