import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hashbench.hashes import (
    ALGORITHMS,
    HASH_FUNCTIONS,
    HASH_LENGTHS,
    HashVector,
    RingPartition,
    block_structure_hash,
    compute_hash,
    cslbp_codes,
    cslbp_hash,
    format_hash,
    hash_from_hex,
    parse_hash,
    phash,
    ring_hash,
)
from hashbench.raster import RasterImage, resize_bilinear
from hashbench.similarity import correlation, hamming


def constant(value=128, shape=(40, 60, 3)):
    return RasterImage(np.full(shape, value, np.uint8))


def shifted(img, delta):
    return RasterImage(img.pixels.astype(np.int64) + delta)


small_images = st.builds(
    RasterImage,
    st.tuples(st.integers(1, 40), st.integers(1, 40), st.sampled_from([1, 3])).flatmap(
        lambda s: arrays(np.uint8, s)
    ),
)


@pytest.mark.parametrize("algo", ALGORITHMS)
@pytest.mark.parametrize("shape", [(1, 1, 1), (7, 300, 3), (256, 256, 3), (97, 61, 1)])
def test_lengths_fixed(algo, shape, rng):
    img = RasterImage(rng.integers(0, 256, size=shape, dtype=np.uint8))
    h = compute_hash(algo, img)
    assert h.algorithm == algo
    assert len(h) == HASH_LENGTHS[algo]
    assert np.all(np.isfinite(h.values))


@settings(max_examples=25, deadline=None)
@given(small_images)
def test_deterministic_and_typed(img):
    for algo, fn in HASH_FUNCTIONS.items():
        a, b = fn(img), fn(img)
        assert a == b
        assert len(a) == HASH_LENGTHS[algo]
    assert phash(img).binary
    v = cslbp_hash(img).values
    assert v.min() >= 0 and v.max() <= 1


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_self_similarity(algo, desk_corpus):
    for img in desk_corpus.values():
        h = compute_hash(algo, img)
        assert correlation(h, h) >= 0.99


def test_unknown_algorithm():
    with pytest.raises(KeyError):
        compute_hash("fdns", constant())


# ---------------------------------------------------------------- pHash


def test_phash_constant_image_is_all_zero():
    h = phash(constant(200))
    assert h.binary and not h.values.any()


def test_phash_balanced(desk_corpus):
    for img in desk_corpus.values():
        ones = int(phash(img).values.sum())
        assert 28 <= ones <= 32  # strictly above the median of 63 values: 31 unless ties


@pytest.mark.parametrize("size", [(256, 256), (512, 512), (384, 320)])
def test_phash_resize_robust(desk_corpus, size):
    for img in desk_corpus.values():
        assert hamming(phash(img), phash(resize_bilinear(img, *size))) <= 8


# ---------------------------------------------------------------- ring


def test_ring_partition_radii():
    part = RingPartition()
    r = part.radii
    assert r[0] == 0 and r[-1] == 256
    assert np.all(np.diff(r) > 0)
    np.testing.assert_allclose(r, 256 * np.sqrt(np.arange(33) / 32))


def test_ring_partition_equal_area():
    labels = RingPartition().labels()
    counts = np.bincount(labels[labels >= 0], minlength=32)
    area = np.pi * 256**2 / 32
    assert np.all(np.abs(counts - area) < 0.02 * area)
    assert set(np.unique(labels)) == set(range(-1, 32))


def test_ring_constant_colour_is_zero():
    assert not ring_hash(constant(90)).values.any()
    assert not ring_hash(RasterImage(np.full((5, 9, 3), (10, 200, 30), np.uint8))).values.any()


def test_ring_grayscale_is_replicated(rng):
    g = rng.integers(0, 256, size=(30, 30, 1), dtype=np.uint8)
    assert ring_hash(RasterImage(g)) == ring_hash(RasterImage(np.repeat(g, 3, axis=2)))


@settings(max_examples=15, deadline=None)
@given(small_images, st.integers(1, 3))
def test_ring_quarter_turn_invariance(img, k):
    turned = RasterImage(np.rot90(img.pixels, k))
    np.testing.assert_allclose(ring_hash(turned).values, ring_hash(img).values, rtol=0, atol=1e-9)


# ---------------------------------------------------------------- block


def test_block_constant_image():
    h = block_structure_hash(constant(77)).values.reshape(16, 5)
    # one block per 4x4 region; ties resolve to each region's top-left block
    expected_idx = [64 * ry + 4 * rx for ry in range(4) for rx in range(4)]
    np.testing.assert_array_equal(h[:, 0], np.array(expected_idx) / 255)
    assert not h[:, 1:].any()


def test_block_first_entry_is_position(desk_corpus):
    img = next(iter(desk_corpus.values()))
    h = block_structure_hash(img).values.reshape(16, 5)
    idx = np.rint(h[:, 0] * 255).astype(int)
    for region, b in enumerate(idx):
        by, bx = divmod(b, 16)
        assert (by // 4) * 4 + bx // 4 == region


def test_block_brightness_shift(desk_corpus):
    for img in desk_corpus.values():
        a = block_structure_hash(img).values.reshape(16, 5)
        b = block_structure_hash(shifted(img, 10)).values.reshape(16, 5)
        np.testing.assert_array_equal(a[:, 0], b[:, 0])
        assert correlation(HashVector("block", a), HashVector("block", b)) >= 0.99


# ---------------------------------------------------------------- CS-LBP


def test_cslbp_constant_image():
    hists = cslbp_hash(constant(33)).values.reshape(16, 16)
    np.testing.assert_array_equal(hists[:, 0], 1.0)
    assert not hists[:, 1:].any()


def test_cslbp_codes_hand_example():
    g = np.array([[0, 10, 0], [0, 0, 20], [5, 0, 0]])
    # E/W: 20-0 > 3 -> bit0; NE/SW: 0-5 -> 0; N/S: 10-0 -> bit2; NW/SE: 0-0 -> 0
    assert cslbp_codes(g).tolist() == [[0b0101]]


def test_cslbp_histograms_normalised(desk_corpus):
    for img in desk_corpus.values():
        hists = cslbp_hash(img).values.reshape(16, 16)
        np.testing.assert_allclose(hists.sum(axis=1), 1.0, atol=1e-9)


def test_cslbp_brightness_invariant(desk_corpus):
    for img in desk_corpus.values():
        base = shifted(img, -16)
        assert base.pixels.max() + 20 <= 255
        assert cslbp_hash(shifted(base, 20)) == cslbp_hash(base)


# ---------------------------------------------------------------- serialisation


@pytest.mark.parametrize("algo", ALGORITHMS)
def test_format_roundtrip(algo, desk_corpus):
    h = compute_hash(algo, desk_corpus["synthetic-003"])
    line = format_hash(h)
    assert line.startswith(f"{algo}:{HASH_LENGTHS[algo]}:")
    assert parse_hash(line) == h


def test_format_binary_values():
    h = HashVector("phash", [1, 0, 0, 1])
    assert format_hash(h) == "phash:4:1,0,0,1"
    assert format_hash(HashVector("ring", [0.1, -2.5])) == "ring:2:0.1,-2.5"


def test_hex_big_endian():
    h = HashVector("phash", [1, 0, 0, 0, 0, 1])
    assert h.to_hex() == "21"
    assert hash_from_hex("phash", "21", 6) == h


def test_hex_roundtrip_phash(desk_corpus):
    h = phash(desk_corpus["synthetic-001"])
    text = h.to_hex()
    assert len(text) == 16
    assert hash_from_hex("phash", text, 63) == h


def test_hex_needs_binary():
    with pytest.raises(ValueError):
        HashVector("ring", [0.5, 1.0]).to_hex()


def test_parse_rejects_bad_lines():
    for line in ("ring:3:1,2", "ring", "ring:x:1"):
        with pytest.raises(ValueError):
            parse_hash(line)


def test_hashvector_invariants():
    with pytest.raises(ValueError):
        HashVector("ring", [1.0, np.inf])
    assert HashVector("phash", [0, 1, 1]).binary
    assert not HashVector("ring", [0, 1, 2]).binary
