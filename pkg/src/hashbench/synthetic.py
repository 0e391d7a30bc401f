"""Hermetic desk corpus: procedurally generated RGB test images.

Every image is built from a SplitMix64 stream keyed on its index, so image
``k`` is the same no matter how many images are requested. Values are kept
inside [16, 239] to leave headroom for brightness shifts.
"""

from __future__ import annotations

import numpy as np

from .raster import RasterImage, resize_float, to_uint8
from .rng import SeededRng, derive_seed

SIZE = 256
LOW, HIGH = 16.0, 239.0
CORPUS_SEED = 0x5EED_DE5C


def value_noise(rng: SeededRng, size: int, octaves: int = 5, base: int = 4) -> np.ndarray:
    """Perlin-like fractal noise: bilinear-upsampled random lattices, summed."""
    out = np.zeros((size, size))
    amp, total = 1.0, 0.0
    cells = base
    for _ in range(octaves):
        lattice = rng.uniform((cells + 1) ** 2).reshape(cells + 1, cells + 1)
        out += amp * resize_float(lattice, size, size)
        total += amp
        amp *= 0.5
        cells *= 2
    return out / total


def _normalise(plane: np.ndarray) -> np.ndarray:
    lo, hi = plane.min(), plane.max()
    if hi - lo < 1e-12:
        return np.full_like(plane, 0.5)
    return (plane - lo) / (hi - lo)


def _grid(size):
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    return xx / (size - 1), yy / (size - 1)


def _blobs(rng: SeededRng, size: int, count: int) -> np.ndarray:
    x, y = _grid(size)
    params = rng.uniform(4 * count).reshape(count, 4)
    out = np.zeros((size, size))
    for cx, cy, r, sign in params:
        radius = 0.05 + 0.2 * r
        weight = 1.0 if sign > 0.3 else -0.7
        out += weight * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * radius**2))
    return out


def _checker(rng: SeededRng, size: int) -> np.ndarray:
    x, y = _grid(size)
    n = 3 + int(rng.uniform(1)[0] * 6)
    angle = rng.uniform(1)[0] * np.pi / 3
    u = x * np.cos(angle) - y * np.sin(angle)
    v = x * np.sin(angle) + y * np.cos(angle)
    return ((np.floor(u * n) + np.floor(v * n)) % 2).astype(np.float64)


def _gradient(rng: SeededRng, size: int) -> np.ndarray:
    x, y = _grid(size)
    a, b, c = rng.uniform(3) * 2 - 1
    return a * x + b * y + c * x * y


def _colourise(rng: SeededRng, luminance: np.ndarray, chroma: np.ndarray) -> np.ndarray:
    """Map a luminance field plus a chroma field to RGB via random palettes."""
    tint_a = rng.uniform(3)
    tint_b = rng.uniform(3)
    lum = _normalise(luminance)[..., None]
    mix = _normalise(chroma)[..., None]
    colour = (1 - mix) * tint_a + mix * tint_b
    rgb = 0.65 * lum + 0.35 * colour * (0.4 + 0.6 * lum)
    return LOW + (HIGH - LOW) * _normalise(rgb)


def make_image(index: int, size: int = SIZE) -> RasterImage:
    rng = SeededRng(derive_seed(CORPUS_SEED, "synthetic", index))
    style = index % 5
    noise = value_noise(rng, size)
    if style == 0:
        lum = _gradient(rng, size) + 0.6 * noise
    elif style == 1:
        lum = _checker(rng, size) * 0.6 + 0.8 * noise
    elif style == 2:
        lum = _blobs(rng, size, 6) + 0.4 * noise
    elif style == 3:
        lum = noise + 0.5 * value_noise(rng, size, octaves=3, base=2)
    else:
        lum = 0.5 * _blobs(rng, size, 3) + 0.5 * _checker(rng, size) * noise + 0.3 * _gradient(rng, size)
    chroma = value_noise(rng, size, octaves=3, base=3) + 0.3 * _blobs(rng, size, 2)
    return RasterImage(to_uint8(_colourise(rng, lum, chroma)))


def synthetic_corpus(n: int, size: int = SIZE) -> dict[str, RasterImage]:
    return {f"synthetic-{i:03d}": make_image(i, size) for i in range(n)}
