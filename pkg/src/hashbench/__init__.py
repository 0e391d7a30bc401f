"""Perceptual image hashing and robustness benchmarking."""

from .attacks import AttackSpec, apply_attack, default_grid, parse_spec
from .bench import BenchReport, DatasetManifest, inter_test, intra_test, roc
from .hashes import (
    ALGORITHMS,
    HashVector,
    block_structure_hash,
    compute_hash,
    cslbp_hash,
    phash,
    ring_hash,
)
from .raster import RasterImage, load_image, save_image
from .similarity import correlation, hamming, is_similar

__all__ = [
    "ALGORITHMS",
    "AttackSpec",
    "BenchReport",
    "DatasetManifest",
    "HashVector",
    "RasterImage",
    "apply_attack",
    "block_structure_hash",
    "compute_hash",
    "correlation",
    "cslbp_hash",
    "default_grid",
    "hamming",
    "inter_test",
    "intra_test",
    "is_similar",
    "load_image",
    "parse_spec",
    "phash",
    "ring_hash",
    "roc",
    "save_image",
]

__version__ = "0.1.0"
