"""Content-preserving image attacks and the default 88-variant grid.

Each attack is described by an :class:`AttackSpec` and applied with
:func:`apply_attack`. Specs round-trip through a one-line text form::

    rotation theta=5
    watermark alpha=0.5 corner=BR
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .raster import (
    RasterImage,
    dct_matrix,
    resize_bilinear,
    to_uint8,
    convolve3x3,
)
from .rng import SeededRng, derive_seed


class AttackError(ValueError):
    pass


# kind -> ordered parameter names; the first one is the "level" used in labels
PARAMS = {
    "brightness": ("b",),
    "contrast": ("c",),
    "gamma": ("gamma",),
    "gaussian3x3": ("sigma",),
    "salt_pepper": ("d",),
    "multiplicative": ("v",),
    "jpeg": ("q",),
    "rotation": ("theta",),
    "scaling": ("s",),
    "watermark": ("alpha", "corner"),
}
KINDS = tuple(PARAMS)
STOCHASTIC = frozenset({"salt_pepper", "multiplicative"})
CORNERS = ("BR", "TL")


def _check_range(name, value, lo, hi, lo_open=False):
    ok = (value > lo if lo_open else value >= lo) and value <= hi
    if not ok or not math.isfinite(value):
        bracket = "(" if lo_open else "["
        raise AttackError(f"{name}={value} outside {bracket}{lo}, {hi}]")


def _validate(kind: str, params: dict) -> None:
    if kind not in PARAMS:
        raise AttackError(f"unknown attack kind {kind!r}")
    expected = set(PARAMS[kind])
    if set(params) != expected:
        raise AttackError(f"{kind} takes parameters {sorted(expected)}, got {sorted(params)}")
    if kind == "brightness":
        _check_range("b", params["b"], -64, 64)
    elif kind == "contrast":
        _check_range("c", params["c"], 0.25, 4)
    elif kind == "gamma":
        _check_range("gamma", params["gamma"], 0.3, 3)
    elif kind == "gaussian3x3":
        _check_range("sigma", params["sigma"], 0, 3, lo_open=True)
    elif kind == "salt_pepper":
        _check_range("d", params["d"], 0, 0.1, lo_open=True)
    elif kind == "multiplicative":
        _check_range("v", params["v"], 0, 0.1, lo_open=True)
    elif kind == "jpeg":
        _check_range("q", params["q"], 1, 100)
        if params["q"] != int(params["q"]):
            raise AttackError("jpeg quality must be an integer")
    elif kind == "rotation":
        _check_range("theta", params["theta"], -180, 180)
    elif kind == "scaling":
        _check_range("s", params["s"], 0.25, 4)
    elif kind == "watermark":
        _check_range("alpha", params["alpha"], 0, 1, lo_open=True)
        if params["corner"] not in CORNERS:
            raise AttackError(f"corner must be one of {CORNERS}")


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    value = float(value)
    if value == int(value):
        return str(int(value))
    return repr(value)


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, value in dict(self.params).items():
            clean[key] = value if isinstance(value, str) else float(value)
        _validate(self.kind, clean)
        object.__setattr__(self, "params", clean)

    @property
    def label(self) -> str:
        if self.kind == "watermark":
            return f"watermark:{_fmt(self.params['alpha'])}@{self.params['corner']}"
        value = self.params[PARAMS[self.kind][0]]
        text = _fmt(value)
        if self.kind in ("brightness", "rotation") and value > 0:
            text = "+" + text
        return f"{self.kind}:{text}"

    def to_line(self) -> str:
        args = " ".join(f"{k}={_fmt(self.params[k])}" for k in PARAMS[self.kind])
        return f"{self.kind} {args}"

    def __str__(self):
        return self.label


def parse_spec(line: str) -> AttackSpec:
    """Parse ``kind key=value ...``."""
    tokens = line.split()
    if not tokens:
        raise AttackError("empty attack spec")
    kind, params = tokens[0], {}
    for tok in tokens[1:]:
        key, sep, raw = tok.partition("=")
        if not sep or not key or not raw:
            raise AttackError(f"bad parameter token {tok!r}")
        if key in params:
            raise AttackError(f"duplicate parameter {key!r}")
        if key == "corner":
            params[key] = raw
        else:
            try:
                params[key] = float(raw)
            except ValueError:
                raise AttackError(f"parameter {key} is not a number: {raw!r}") from None
    return AttackSpec(kind, params)


def read_grid(path) -> list[AttackSpec]:
    specs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                specs.append(parse_spec(line))
    return specs


def write_grid(specs, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for spec in specs:
            fh.write(spec.to_line() + "\n")


def default_grid() -> list[AttackSpec]:
    """The 88 attack variants, in a fixed order."""
    grid: list[AttackSpec] = []
    for b in (5, 10, 15, 20):
        grid += [AttackSpec("brightness", {"b": b}), AttackSpec("brightness", {"b": -b})]
    grid += [AttackSpec("contrast", {"c": c}) for c in (0.6, 0.7, 0.8, 0.9, 1.1, 1.2, 1.3, 1.4)]
    grid += [AttackSpec("gamma", {"gamma": g}) for g in (0.6, 0.7, 0.8, 0.9, 1.1, 1.25, 1.5, 1.75)]
    grid += [
        AttackSpec("gaussian3x3", {"sigma": s})
        for s in (0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0)
    ]
    grid += [
        AttackSpec("salt_pepper", {"d": d})
        for d in (0.001, 0.002, 0.005, 0.008, 0.01, 0.012, 0.015, 0.02)
    ]
    grid += [
        AttackSpec("multiplicative", {"v": v})
        for v in (0.001, 0.002, 0.005, 0.008, 0.01, 0.02, 0.05, 0.1)
    ]
    grid += [AttackSpec("jpeg", {"q": q}) for q in (30, 40, 50, 60, 70, 80, 90, 100)]
    for t in (1, 2, 5, 10, 15, 30, 45, 90):
        grid += [AttackSpec("rotation", {"theta": t}), AttackSpec("rotation", {"theta": -t})]
    grid += [AttackSpec("scaling", {"s": s}) for s in (0.5, 0.75, 0.9, 1.1, 1.25, 1.5, 1.75, 2.0)]
    grid += [
        AttackSpec("watermark", {"alpha": a, "corner": c})
        for a in (0.3, 0.5, 0.8, 1.0)
        for c in CORNERS
    ]
    return grid


# --------------------------------------------------------------------------
# individual operations
# --------------------------------------------------------------------------


def _float(img: RasterImage) -> np.ndarray:
    return img.pixels.astype(np.float64)


def gaussian_kernel(sigma: float) -> np.ndarray:
    x = np.arange(-1, 2, dtype=np.float64)
    k = np.exp(-(x[:, None] ** 2 + x[None, :] ** 2) / (2.0 * sigma * sigma))
    return k / k.sum()


def stream_for(img: RasterImage, spec: AttackSpec, seed: int) -> SeededRng:
    """Random stream keyed on (seed, image dimensions, attack label)."""
    return SeededRng(derive_seed(seed, img.width, img.height, img.channels, spec.label))


def salt_pepper_mask(img: RasterImage, spec: AttackSpec, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Replacement mask and salt/pepper choice per pixel, both (h, w) bool.

    The first h*w uniforms decide replacement (u < d), the next h*w pick
    white (u >= 0.5) or black.
    """
    rng = stream_for(img, spec, seed)
    n = img.width * img.height
    shape = (img.height, img.width)
    mask = (rng.uniform(n) < spec.params["d"]).reshape(shape)
    salt = (rng.uniform(n) >= 0.5).reshape(shape)
    return mask, salt


def multiplicative_noise(img: RasterImage, spec: AttackSpec, seed: int) -> np.ndarray:
    """Per-sample noise n ~ Normal(0, v), shape of the pixel array."""
    rng = stream_for(img, spec, seed)
    std = math.sqrt(spec.params["v"])
    return rng.normal(img.pixels.size, 0.0, std).reshape(img.pixels.shape)


JPEG_LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.int64,
)


def quant_table(quality: int) -> np.ndarray:
    """IJG quality scaling of the standard luminance table."""
    q = int(quality)
    scale = 5000 // q if q < 50 else 200 - 2 * q
    return np.clip((JPEG_LUMA_TABLE * scale + 50) // 100, 1, 255).astype(np.float64)


def jpeg_roundtrip(img: RasterImage, quality: int) -> RasterImage:
    """Quantise 8x8 block DCT coefficients of every channel and reconstruct."""
    table = quant_table(quality)
    h, w, ch = img.pixels.shape
    ph, pw = -h % 8, -w % 8
    x = np.pad(_float(img), ((0, ph), (0, pw), (0, 0)), mode="edge") - 128.0
    H, W = x.shape[:2]
    # (block_row, block_col, channel, 8, 8)
    blocks = x.reshape(H // 8, 8, W // 8, 8, ch).transpose(0, 2, 4, 1, 3)
    d = dct_matrix(8)
    coeffs = d @ blocks @ d.T
    coeffs = np.round(coeffs / table) * table
    recon = d.T @ coeffs @ d
    out = recon.transpose(0, 3, 1, 4, 2).reshape(H, W, ch)[:h, :w] + 128.0
    return RasterImage(to_uint8(out))


def _rotation_cos_sin(theta: float) -> tuple[float, float]:
    if theta % 90 == 0:
        # exact values so quarter turns are pure pixel permutations
        return {0: (1.0, 0.0), 1: (0.0, 1.0), 2: (-1.0, 0.0), 3: (0.0, -1.0)}[int(theta // 90) % 4]
    t = math.radians(theta)
    return math.cos(t), math.sin(t)


def rotate(img: RasterImage, theta: float) -> RasterImage:
    """Rotate about the image centre (counter-clockwise for positive angles).

    Output keeps the input size; destinations that map outside the source
    grid are black.
    """
    h, w, _ = img.pixels.shape
    cos, sin = _rotation_cos_sin(theta)
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    dx, dy = xx - cx, yy - cy
    # inverse rotation; image y axis points down
    sx = cos * dx - sin * dy + cx
    sy = sin * dx + cos * dy + cy
    eps = 1e-9
    inside = (sx >= -eps) & (sx <= w - 1 + eps) & (sy >= -eps) & (sy <= h - 1 + eps)
    sx = np.clip(sx, 0, w - 1)
    sy = np.clip(sy, 0, h - 1)
    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = (sx - x0)[..., None]
    fy = (sy - y0)[..., None]
    p = _float(img)
    top = p[y0, x0] * (1 - fx) + p[y0, x1] * fx
    bottom = p[y1, x0] * (1 - fx) + p[y1, x1] * fx
    out = top * (1 - fy) + bottom * fy
    out[~inside] = 0.0
    return RasterImage(to_uint8(out))


LOGO_SIZE = 32


def checkerboard_logo(size: int = LOGO_SIZE, check: int = 8) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size]
    return np.where(((yy // check) + (xx // check)) % 2 == 0, 255, 0).astype(np.float64)


def watermark(img: RasterImage, alpha: float, corner: str) -> RasterImage:
    h, w, ch = img.pixels.shape
    lh, lw = min(LOGO_SIZE, h), min(LOGO_SIZE, w)
    logo = checkerboard_logo()
    out = _float(img)
    if corner == "BR":
        ys, xs = slice(h - lh, h), slice(w - lw, w)
        mark = logo[LOGO_SIZE - lh :, LOGO_SIZE - lw :]
    else:
        ys, xs = slice(0, lh), slice(0, lw)
        mark = logo[:lh, :lw]
    region = out[ys, xs]
    out[ys, xs] = (1 - alpha) * region + alpha * mark[..., None]
    return RasterImage(to_uint8(out))


def apply_attack(img: RasterImage, spec: AttackSpec, seed: int = 0) -> RasterImage:
    """Apply one attack. Only the noise kinds consume ``seed``."""
    p = spec.params
    kind = spec.kind
    if kind == "brightness":
        return RasterImage(to_uint8(_float(img) + p["b"]))
    if kind == "contrast":
        return RasterImage(to_uint8((_float(img) - 128.0) * p["c"] + 128.0))
    if kind == "gamma":
        if p["gamma"] == 1.0:
            return img
        return RasterImage(to_uint8(255.0 * (_float(img) / 255.0) ** p["gamma"]))
    if kind == "gaussian3x3":
        return convolve3x3(img, gaussian_kernel(p["sigma"]))
    if kind == "salt_pepper":
        mask, salt = salt_pepper_mask(img, spec, seed)
        out = img.pixels.copy()
        out[mask] = np.where(salt[mask], 255, 0)[:, None].astype(np.uint8)
        return RasterImage(out)
    if kind == "multiplicative":
        noise = multiplicative_noise(img, spec, seed)
        return RasterImage(to_uint8(_float(img) * (1.0 + noise)))
    if kind == "jpeg":
        return jpeg_roundtrip(img, int(p["q"]))
    if kind == "rotation":
        return rotate(img, p["theta"])
    if kind == "scaling":
        s = p["s"]
        w = max(1, int(math.floor(s * img.width + 0.5)))
        h = max(1, int(math.floor(s * img.height + 0.5)))
        return resize_bilinear(img, w, h)
    if kind == "watermark":
        return watermark(img, p["alpha"], p["corner"])
    raise AttackError(f"unknown attack kind {kind!r}")
