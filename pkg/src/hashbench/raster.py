"""Raster image model, PGM/PPM I/O and the pixel kernels shared by the hashes.

Images are held as ``uint8`` arrays of shape ``(height, width, channels)``.
Working buffers (DCT planes, Lab planes) are plain ``float64`` 2-D arrays.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass

import numpy as np


class ImageFormatError(ValueError):
    """Base class for PGM/PPM parsing failures."""


class MalformedHeaderError(ImageFormatError):
    pass


class UnsupportedBitDepthError(ImageFormatError):
    pass


class TruncatedDataError(ImageFormatError):
    pass


@dataclass(frozen=True, eq=False)
class RasterImage:
    """8-bit grayscale or RGB image, row-major, channel-interleaved."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ValueError(f"expected (h, w, 1|3) pixel array, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("image dimensions must be >= 1")
        if px.dtype != np.uint8:
            if np.issubdtype(px.dtype, np.floating) and not np.all(np.isfinite(px)):
                raise ValueError("pixel values must be finite")
            if px.size and (px.min() < 0 or px.max() > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            if np.issubdtype(px.dtype, np.floating) and np.any(px != np.floor(px)):
                raise ValueError("pixel values must be integers")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_bytes(cls, width: int, height: int, channels: int, data) -> RasterImage:
        buf = np.frombuffer(bytes(data), dtype=np.uint8)
        if buf.size != width * height * channels:
            raise ValueError(
                f"expected {width * height * channels} samples, got {buf.size}"
            )
        return cls(buf.reshape(height, width, channels))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and np.array_equal(
            self.pixels, other.pixels
        )

    def __repr__(self):
        return f"RasterImage({self.width}x{self.height}x{self.channels})"


@dataclass(frozen=True)
class LabImage:
    L: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @property
    def height(self) -> int:
        return self.L.shape[0]

    @property
    def width(self) -> int:
        return self.L.shape[1]


def round_half_up(values: np.ndarray) -> np.ndarray:
    """Round to nearest integer with ties going up.

    Unlike banker's rounding this commutes with integer shifts, so a uniform
    brightness offset survives resampling unchanged.
    """
    return np.floor(np.asarray(values, dtype=np.float64) + 0.5)


def to_uint8(values: np.ndarray) -> np.ndarray:
    return np.clip(round_half_up(values), 0, 255).astype(np.uint8)


# --------------------------------------------------------------------------
# PGM / PPM
# --------------------------------------------------------------------------

_WHITESPACE = b" \t\n\r\v\f"


def _read_header(data: bytes) -> tuple[bytes, list[int], int]:
    """Return (magic, [width, height, maxval], payload offset)."""
    pos = 0
    tokens: list[bytes] = []
    n = len(data)
    while len(tokens) < 4:
        while pos < n and (data[pos] in _WHITESPACE or data[pos] == ord("#")):
            if data[pos] == ord("#"):
                while pos < n and data[pos] not in b"\r\n":
                    pos += 1
            else:
                pos += 1
        if pos >= n:
            raise MalformedHeaderError("header ended early")
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    if pos >= n or data[pos] not in _WHITESPACE:
        raise MalformedHeaderError("missing whitespace after maxval")
    pos += 1
    magic = tokens[0]
    try:
        numbers = [int(t) for t in tokens[1:]]
    except ValueError as exc:
        raise MalformedHeaderError(f"non-numeric header field: {exc}") from None
    return magic, numbers, pos


def load_image(path: str | os.PathLike) -> RasterImage:
    """Read a binary PGM (P5) or PPM (P6) file with maxval 255."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 2 or data[:2] not in (b"P5", b"P6"):
        raise MalformedHeaderError(f"{path}: not a binary PGM/PPM file")
    magic, (width, height, maxval), offset = _read_header(data)
    if magic not in (b"P5", b"P6"):
        raise MalformedHeaderError(f"{path}: bad magic {magic!r}")
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"{path}: bad dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedBitDepthError(f"{path}: unsupported bit depth (maxval {maxval})")
    channels = 1 if magic == b"P5" else 3
    need = width * height * channels
    payload = data[offset : offset + need]
    if len(payload) < need:
        raise TruncatedDataError(
            f"{path}: truncated pixel data ({len(payload)} of {need} bytes)"
        )
    return RasterImage.from_bytes(width, height, channels, payload)


def encode_image(img: RasterImage) -> bytes:
    magic = "P5" if img.channels == 1 else "P6"
    header = f"{magic}\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.tobytes()


def save_image(img: RasterImage, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_image(img))


# --------------------------------------------------------------------------
# colour
# --------------------------------------------------------------------------


def to_grayscale(img: RasterImage) -> RasterImage:
    """BT.601 luma, computed in integer arithmetic (round half up)."""
    if img.channels == 1:
        return img
    px = img.pixels.astype(np.int64)
    luma = (299 * px[..., 0] + 587 * px[..., 1] + 114 * px[..., 2] + 500) // 1000
    return RasterImage(luma.astype(np.uint8))


def to_rgb(img: RasterImage) -> RasterImage:
    if img.channels == 3:
        return img
    return RasterImage(np.repeat(img.pixels, 3, axis=2))


_RGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# D65 white, taken as the XYZ of sRGB (1, 1, 1) so white maps to a = b = 0
_WHITE_D65 = _RGB_TO_XYZ.sum(axis=1)


def srgb_to_linear(values: np.ndarray) -> np.ndarray:
    c = np.asarray(values, dtype=np.float64) / 255.0
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


_SRGB_LUT = srgb_to_linear(np.arange(256))


def _lab_f(t: np.ndarray) -> np.ndarray:
    eps = (6.0 / 29.0) ** 3
    return np.where(t > eps, np.cbrt(t), t / (3 * (6.0 / 29.0) ** 2) + 4.0 / 29.0)


def rgb_to_lab(img: RasterImage) -> LabImage:
    if img.channels != 3:
        raise ValueError("rgb_to_lab needs a 3-channel image; replicate grayscale first")
    r, g, b = (_SRGB_LUT[img.pixels[..., i]] for i in range(3))
    m, white = _RGB_TO_XYZ, _WHITE_D65
    fx = _lab_f((m[0, 0] * r + m[0, 1] * g + m[0, 2] * b) / white[0])
    fy = _lab_f((m[1, 0] * r + m[1, 1] * g + m[1, 2] * b) / white[1])
    fz = _lab_f((m[2, 0] * r + m[2, 1] * g + m[2, 2] * b) / white[2])
    L = 116.0 * fy - 16.0
    return LabImage(np.clip(L, 0.0, 100.0), 500.0 * (fx - fy), 200.0 * (fy - fz))


# --------------------------------------------------------------------------
# resampling and filtering
# --------------------------------------------------------------------------


def _axis_weights(src: int, dst: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    scale = src / dst
    coord = (np.arange(dst) + 0.5) * scale - 0.5
    coord = np.clip(coord, 0.0, src - 1)
    lo = np.floor(coord).astype(np.intp)
    hi = np.minimum(lo + 1, src - 1)
    frac = coord - lo
    return lo, hi, frac


def resize_float(plane: np.ndarray, w: int, h: int) -> np.ndarray:
    """Bilinear resample of an (h, w[, c]) array to float64, pixel-centre aligned."""
    src_h, src_w = plane.shape[:2]
    x0, x1, fx = _axis_weights(src_w, w)
    y0, y1, fy = _axis_weights(src_h, h)
    extra = (None,) * (plane.ndim - 2)
    fx = fx[(None, slice(None)) + extra]
    rows = np.take(plane, x0, axis=1).astype(np.float64)
    rows *= 1.0 - fx
    right = np.take(plane, x1, axis=1).astype(np.float64)
    right *= fx
    rows += right
    fy = fy[(slice(None), None) + extra]
    out = np.take(rows, y0, axis=0)
    out *= 1.0 - fy
    below = np.take(rows, y1, axis=0)
    below *= fy
    out += below
    return out


def _axis_weights_exact(src: int, dst: int):
    """Integer form of :func:`_axis_weights`: weights are ``frac / den``.

    The source coordinate ((2 dst_i + 1) src - dst) / (2 dst) is a rational
    with denominator 2 dst, so interpolation can run in exact integer math.
    """
    den = 2 * dst
    num = (2 * np.arange(dst, dtype=np.int64) + 1) * src - dst
    num = np.clip(num, 0, (src - 1) * den)
    lo = num // den
    frac = num - lo * den
    hi = np.minimum(lo + 1, src - 1)
    return lo, hi, frac, den


def resize_bilinear(img: RasterImage, w: int, h: int) -> RasterImage:
    """Bilinear resize with pixel-centre alignment and edge clamping.

    Computed exactly in integers and rounded half up, so the result does not
    depend on the order of the two passes (a 90 degree rotation of the input
    gives the rotated output, bit for bit).
    """
    if w < 1 or h < 1:
        raise ValueError("target dimensions must be >= 1")
    if (w, h) == (img.width, img.height):
        return img
    x0, x1, fx, dx = _axis_weights_exact(img.width, w)
    y0, y1, fy, dy = _axis_weights_exact(img.height, h)
    px = img.pixels
    fx = fx[None, :, None]
    rows = np.take(px, x0, axis=1).astype(np.int64)
    rows *= dx - fx
    rows += np.take(px, x1, axis=1).astype(np.int64) * fx
    fy = fy[:, None, None]
    out = np.take(rows, y0, axis=0)
    out *= dy - fy
    out += np.take(rows, y1, axis=0) * fy
    d = dx * dy
    out = (2 * out + d) // (2 * d)
    return RasterImage(out.astype(np.uint8))


def correlate3x3(plane: np.ndarray, kernel) -> np.ndarray:
    """3x3 cross-correlation of an (h, w[, c]) float array, border replicated."""
    k = np.asarray(kernel, dtype=np.float64).reshape(3, 3)
    pad = [(1, 1), (1, 1)] + [(0, 0)] * (plane.ndim - 2)
    padded = np.pad(plane, pad, mode="edge")
    h, w = plane.shape[:2]
    out = np.zeros(plane.shape, dtype=np.float64)
    for dy in range(3):
        for dx in range(3):
            if k[dy, dx] != 0.0:
                out += k[dy, dx] * padded[dy : dy + h, dx : dx + w]
    return out


def convolve3x3(img: RasterImage, kernel) -> RasterImage:
    """Filter every channel with a 3x3 kernel.

    The kernel is applied as written (cross-correlation); for the symmetric
    kernels used here that is identical to convolution.
    """
    k = np.asarray(kernel, dtype=np.float64)
    if k.size != 9 or not np.all(np.isfinite(k)):
        raise ValueError("kernel must be 9 finite weights")
    return RasterImage(to_uint8(correlate3x3(img.pixels.astype(np.float64), k)))


# --------------------------------------------------------------------------
# DCT
# --------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis; ``dct_matrix(n) @ x`` transforms a column."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    m = np.cos(math.pi * (2 * i + 1) * k / (2 * n)) * math.sqrt(2.0 / n)
    m[0, :] = math.sqrt(1.0 / n)
    m.setflags(write=False)
    return m


def dct2(plane: np.ndarray) -> np.ndarray:
    """Orthonormal 2-D DCT-II. Element ``[0, 0]`` is the DC term."""
    x = np.asarray(plane, dtype=np.float64)
    if x.ndim != 2 or min(x.shape) < 1:
        raise ValueError("dct2 expects a non-empty 2-D plane")
    h, w = x.shape
    # rows first, then columns
    return dct_matrix(h) @ (x @ dct_matrix(w).T)


def idct2(plane: np.ndarray) -> np.ndarray:
    c = np.asarray(plane, dtype=np.float64)
    if c.ndim != 2 or min(c.shape) < 1:
        raise ValueError("idct2 expects a non-empty 2-D plane")
    h, w = c.shape
    return dct_matrix(h).T @ c @ dct_matrix(w)


def psnr(a: RasterImage, b: RasterImage) -> float:
    if a.pixels.shape != b.pixels.shape:
        raise ValueError("psnr needs images of identical shape")
    mse = np.mean((a.pixels.astype(np.float64) - b.pixels.astype(np.float64)) ** 2)
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)
