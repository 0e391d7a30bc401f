"""Perceptual hash algorithms.

Four fixed-length image hashes:

* ``phash``  -- 63-bit DCT low-frequency hash, median binarised.
* ``ring``   -- 32 ring-statistic distances in CIE Lab (rotation invariant).
* ``block``  -- DCT features of the most edge-rich 16x16 block per region.
* ``cslbp``  -- 16 block histograms of centre-symmetric LBP codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .raster import (
    RasterImage,
    correlate3x3,
    dct2,
    resize_bilinear,
    rgb_to_lab,
    to_grayscale,
    to_rgb,
)

HASH_LENGTHS = {"phash": 63, "ring": 32, "block": 80, "cslbp": 256}
ALGORITHMS = tuple(HASH_LENGTHS)


@dataclass(frozen=True, eq=False)
class HashVector:
    algorithm: str
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise ValueError("hash values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def binary(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))

    def __len__(self):
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, HashVector):
            return NotImplemented
        return self.algorithm == other.algorithm and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"HashVector({self.algorithm!r}, l={len(self)})"

    def to_hex(self) -> str:
        """Big-endian hex of the bit string (first value is the top bit)."""
        if not self.binary:
            raise ValueError("only binary hashes have a hex form")
        bits = "".join("1" if v else "0" for v in self.values)
        width = (len(bits) + 3) // 4
        return format(int(bits, 2), f"0{width}x")


def _format_value(v: float) -> str:
    text = repr(float(v))
    if text.endswith(".0"):
        text = text[:-2]
    return "0" if text == "-0" else text


def format_hash(h: HashVector) -> str:
    """``algorithm:length:v1,v2,...`` with shortest round-trip decimals."""
    return f"{h.algorithm}:{len(h)}:" + ",".join(_format_value(v) for v in h.values)


def parse_hash(line: str) -> HashVector:
    try:
        algorithm, length, body = line.strip().split(":", 2)
        values = [float(t) for t in body.split(",")] if body else []
        n = int(length)
    except ValueError:
        raise ValueError(f"malformed hash line: {line!r}") from None
    if n != len(values):
        raise ValueError(f"hash line declares {n} values but carries {len(values)}")
    return HashVector(algorithm, np.array(values))


def hash_from_hex(algorithm: str, text: str, length: int) -> HashVector:
    bits = bin(int(text, 16))[2:].zfill(length)
    if len(bits) != length:
        raise ValueError("hex string longer than the declared hash length")
    return HashVector(algorithm, np.array([int(c) for c in bits], dtype=np.float64))


# --------------------------------------------------------------------------
# pHash
# --------------------------------------------------------------------------


def phash(img: RasterImage) -> HashVector:
    plane = resize_bilinear(to_grayscale(img), 32, 32).pixels[:, :, 0].astype(np.float64)
    # the mean of 1024 integers is exact; removing it touches only the DC term
    # and leaves a constant image with exactly zero AC coefficients
    coeffs = dct2(plane - plane.mean())
    low = coeffs[:8, :8].reshape(-1)[1:]
    bits = (low > np.median(low)).astype(np.float64)
    return HashVector("phash", bits)


# --------------------------------------------------------------------------
# ring partition
# --------------------------------------------------------------------------

RING_COUNT = 32
RING_SIZE = 512


@dataclass(frozen=True)
class RingPartition:
    """Equal-area rings of the disc inscribed in a ``size`` x ``size`` grid."""

    ring_count: int = RING_COUNT
    size: int = RING_SIZE

    @property
    def r_max(self) -> float:
        return self.size / 2.0

    @property
    def radii(self) -> np.ndarray:
        k = np.arange(self.ring_count + 1)
        return self.r_max * np.sqrt(k / self.ring_count)

    def labels(self) -> np.ndarray:
        """Ring index per pixel, -1 outside the disc.

        Membership is decided on squared distances against r_max**2 * k / R,
        which keeps it exact for the 90 degree symmetries of the grid.
        """
        c = (self.size - 1) / 2.0
        coord = np.arange(self.size) - c
        d2 = coord[:, None] ** 2 + coord[None, :] ** 2
        step = self.r_max**2 / self.ring_count
        idx = np.floor(d2 / step).astype(np.intp)
        idx[d2 >= self.r_max**2] = -1
        return idx


_DEFAULT_RINGS = RingPartition()
_RING_LABELS = _DEFAULT_RINGS.labels()
_RING_LABELS.setflags(write=False)


def ring_features(img: RasterImage, partition: RingPartition = _DEFAULT_RINGS) -> np.ndarray:
    """Per-ring (mean L, std L, mean a, mean b), shape (ring_count, 4)."""
    lab = rgb_to_lab(resize_bilinear(to_rgb(img), partition.size, partition.size))
    labels = _RING_LABELS if partition == _DEFAULT_RINGS else partition.labels()
    inside = labels >= 0
    idx = labels[inside]
    n = partition.ring_count
    counts = np.bincount(idx, minlength=n).astype(np.float64)

    def ring_mean(values):
        # shift by the disc minimum (rotation invariant) so equal values average exactly
        ref = values.min()
        return ref + np.bincount(idx, weights=values - ref, minlength=n) / counts

    L = lab.L[inside]
    mean_l = ring_mean(L)
    centred = L - mean_l[idx]
    std_l = np.sqrt(np.bincount(idx, weights=centred * centred, minlength=n) / counts)
    return np.stack([mean_l, std_l, ring_mean(lab.a[inside]), ring_mean(lab.b[inside])], axis=1)


def ring_hash(img: RasterImage) -> HashVector:
    feats = ring_features(img)
    centroid = feats[0] + (feats - feats[0]).mean(axis=0)
    return HashVector("ring", np.linalg.norm(feats - centroid, axis=1))


# --------------------------------------------------------------------------
# salient-block DCT hash
# --------------------------------------------------------------------------

BLOCK_SIZE = 16
BLOCK_WORKING = 256
REGION_BLOCKS = 4  # a region is 4x4 blocks; 16 regions, one block each
# first four AC positions of the JPEG zigzag, (row, col)
ZIGZAG_AC4 = ((0, 1), (1, 0), (2, 0), (1, 1))

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = SOBEL_X.T


def edge_map(gray: np.ndarray) -> np.ndarray:
    gx = correlate3x3(gray, SOBEL_X)
    gy = correlate3x3(gray, SOBEL_Y)
    mag = np.hypot(gx, gy)
    return mag > mag.mean() + mag.std()


def block_edge_counts(edges: np.ndarray, size: int = BLOCK_SIZE) -> np.ndarray:
    nby, nbx = edges.shape[0] // size, edges.shape[1] // size
    return edges.reshape(nby, size, nbx, size).sum(axis=(1, 3))


def select_blocks(edges: np.ndarray, size: int = BLOCK_SIZE, region: int = REGION_BLOCKS) -> np.ndarray:
    """Row-major index of the most edge-rich block in each region.

    Regions are visited in row-major order; within a region ties go to the
    lowest block index. One block per region keeps every hash slot tied to a
    fixed part of the image, so a change in one region's pick cannot shift
    the features of the others.
    """
    counts = block_edge_counts(edges, size)
    nby, nbx = counts.shape
    chosen = []
    for ry in range(0, nby, region):
        for rx in range(0, nbx, region):
            sub = counts[ry : ry + region, rx : rx + region]
            dy, dx = divmod(int(np.argmax(sub)), sub.shape[1])
            chosen.append((ry + dy) * nbx + rx + dx)
    return np.array(chosen, dtype=np.intp)


def block_structure_hash(img: RasterImage) -> HashVector:
    gray = resize_bilinear(to_grayscale(img), BLOCK_WORKING, BLOCK_WORKING)
    plane = gray.pixels[:, :, 0].astype(np.float64)
    chosen = select_blocks(edge_map(plane))
    nbx = BLOCK_WORKING // BLOCK_SIZE
    rows, cols = zip(*ZIGZAG_AC4)
    parts = []
    for b in chosen:
        by, bx = divmod(int(b), nbx)
        block = plane[by * BLOCK_SIZE : (by + 1) * BLOCK_SIZE, bx * BLOCK_SIZE : (bx + 1) * BLOCK_SIZE]
        coeffs = dct2(block - block.mean())
        parts.append([b / 255.0, *coeffs[rows, cols]])
    return HashVector("block", np.concatenate(parts))


# --------------------------------------------------------------------------
# CS-LBP
# --------------------------------------------------------------------------

CSLBP_SIZE = 64
CSLBP_THRESHOLD = 3
CSLBP_BLOCK = 16


def cslbp_codes(gray: np.ndarray, threshold: int = CSLBP_THRESHOLD) -> np.ndarray:
    """4-bit codes for interior pixels, shape (h - 2, w - 2)."""
    g = gray.astype(np.int64)
    h, w = g.shape

    def at(dy, dx):
        return g[1 + dy : h - 1 + dy, 1 + dx : w - 1 + dx]

    # neighbour j against neighbour j + 4: E/W, NE/SW, N/S, NW/SE
    pairs = [((0, 1), (0, -1)), ((-1, 1), (1, -1)), ((-1, 0), (1, 0)), ((-1, -1), (1, 1))]
    codes = np.zeros((h - 2, w - 2), dtype=np.int64)
    for bit, (p, q) in enumerate(pairs):
        codes |= ((at(*p) - at(*q)) > threshold).astype(np.int64) << bit
    return codes


def cslbp_hash(img: RasterImage) -> HashVector:
    gray = resize_bilinear(to_grayscale(img), CSLBP_SIZE, CSLBP_SIZE).pixels[:, :, 0]
    codes = np.full((CSLBP_SIZE, CSLBP_SIZE), -1, dtype=np.int64)
    codes[1:-1, 1:-1] = cslbp_codes(gray)
    nb = CSLBP_SIZE // CSLBP_BLOCK
    hists = []
    for by in range(nb):
        for bx in range(nb):
            block = codes[by * CSLBP_BLOCK : (by + 1) * CSLBP_BLOCK, bx * CSLBP_BLOCK : (bx + 1) * CSLBP_BLOCK]
            valid = block[block >= 0]
            hists.append(np.bincount(valid, minlength=16) / valid.size)
    return HashVector("cslbp", np.concatenate(hists))


HASH_FUNCTIONS: dict[str, Callable[[RasterImage], HashVector]] = {
    "phash": phash,
    "ring": ring_hash,
    "block": block_structure_hash,
    "cslbp": cslbp_hash,
}


def compute_hash(algorithm: str, img: RasterImage) -> HashVector:
    try:
        fn = HASH_FUNCTIONS[algorithm]
    except KeyError:
        raise KeyError(f"unknown hash algorithm {algorithm!r}") from None
    return fn(img)
