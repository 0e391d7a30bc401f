"""Hash similarity: correlation coefficient, threshold decision, Hamming distance."""

from __future__ import annotations

import numpy as np

from .hashes import HashVector

XI = 1e-10


class HashMismatchError(ValueError):
    pass


def _check_pair(h1: HashVector, h2: HashVector) -> None:
    if h1.algorithm != h2.algorithm:
        raise HashMismatchError(
            f"cannot compare {h1.algorithm!r} hash with {h2.algorithm!r} hash"
        )
    if len(h1) != len(h2):
        raise HashMismatchError(f"hash lengths differ: {len(h1)} vs {len(h2)}")
    if len(h1) < 2:
        raise HashMismatchError("correlation needs hashes of length >= 2")


def correlation_values(x, y, xi: float = XI) -> float:
    """Correlation coefficient of two equal-length real vectors.

    The denominator carries ``xi`` so constant vectors score 0 instead of
    dividing by zero.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    num = float(np.dot(dx, dy))
    den = float(np.sqrt(np.dot(dx, dx))) * float(np.sqrt(np.dot(dy, dy))) + xi
    return num / den


def correlation(h1: HashVector, h2: HashVector) -> float:
    _check_pair(h1, h2)
    return correlation_values(h1.values, h2.values)


def is_similar(h1: HashVector, h2: HashVector, threshold: float) -> bool:
    """True when the hashes correlate strictly above ``threshold``."""
    if not -1.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (-1, 1)")
    return correlation(h1, h2) > threshold


def hamming(h1: HashVector, h2: HashVector) -> int:
    if not (h1.binary and h2.binary):
        raise HashMismatchError("hamming distance needs binary hashes")
    if len(h1) != len(h2):
        raise HashMismatchError(f"hash lengths differ: {len(h1)} vs {len(h2)}")
    return int(np.count_nonzero(h1.values != h2.values))
