import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hashbench.hashes import HashVector
from hashbench.similarity import XI, HashMismatchError, correlation, hamming, is_similar

from oracles import pearson


def hv(values, algorithm="ring"):
    return HashVector(algorithm, np.asarray(values, dtype=float))


def test_perfect_correlation():
    assert correlation(hv([1, 2, 3, 4]), hv([1, 2, 3, 4])) == pytest.approx(1.0, abs=1e-9)


def test_perfect_anticorrelation():
    assert correlation(hv([1, 2, 3, 4]), hv([-1, -2, -3, -4])) == pytest.approx(-1.0, abs=1e-9)


def test_constant_hash_scores_zero():
    assert correlation(hv([5, 5, 5, 5]), hv([3, 1, 4, 1])) == 0.0
    assert correlation(hv([5, 5, 5, 5]), hv([5, 5, 5, 5])) == 0.0


def test_orthogonal_centred_vectors():
    # centred: [.5,-.5,.5,-.5] . [.5,-.5,-.5,.5] = 0
    assert correlation(hv([1, 0, 1, 0]), hv([1, 0, 0, 1])) == pytest.approx(0.0, abs=1e-9)


def test_errors():
    with pytest.raises(HashMismatchError):
        correlation(hv([1, 2, 3]), hv([1, 2]))
    with pytest.raises(HashMismatchError):
        correlation(hv([1, 2, 3], "ring"), hv([1, 2, 3], "block"))
    with pytest.raises(HashMismatchError):
        correlation(hv([1]), hv([1]))


def test_guard_constant_dominates_tiny_spreads():
    # both spreads above 1e-6, yet xi = 1e-10 outweighs a 4.5e-12 norm product
    x = hv([0.0, 3e-6])
    assert correlation(x, x) < 0.05
    assert pearson([0.0, 3e-6], [0.0, 3e-6]) == pytest.approx(1.0)


def test_threshold_decision():
    a = hv([1, 2, 3, 4])
    assert is_similar(a, a, 0.98)
    assert not is_similar(hv([1, 0, 1, 0]), hv([1, 0, 0, 1]), 0.98)


def test_threshold_is_strict():
    a, b = hv([1, 0, 1, 0]), hv([1, 0, 0, 1])
    s = correlation(a, b)
    assert not is_similar(a, b, s)
    assert is_similar(a, b, math.nextafter(s, -1))


def test_threshold_range():
    a = hv([1, 2, 3])
    for t in (-1.0, 1.0, 2.0):
        with pytest.raises(ValueError):
            is_similar(a, a, t)


def test_hamming():
    a = hv([1, 0, 1], "phash")
    assert hamming(a, a) == 0
    assert hamming(a, hv([1, 1, 1], "phash")) == 1
    bits = np.arange(63) % 2
    assert hamming(hv(bits, "phash"), hv(1 - bits, "phash")) == 63
    with pytest.raises(HashMismatchError):
        hamming(hv([0.5, 1, 0]), hv([1, 1, 0]))


vectors = st.integers(2, 64).flatmap(
    lambda n: st.tuples(
        st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n),
        st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n),
    )
)


@settings(max_examples=300, deadline=None)
@given(vectors, st.floats(0.01, 100), st.floats(-100, 100))
def test_properties(pair, a, b):
    x, y = pair
    h1, h2 = hv(x), hv(y)
    s = correlation(h1, h2)
    assert s == correlation(h2, h1)
    assert abs(s) <= 1 + 1e-12
    # |S - r| <= xi / (|x - mx| |y - my|), so 1e-9 agreement needs a norm product >= 0.1
    norms = np.linalg.norm(np.subtract(x, np.mean(x))) * np.linalg.norm(np.subtract(y, np.mean(y)))
    if np.std(x) > 1e-6 and np.std(y) > 1e-6 and norms >= 0.1:
        assert s == pytest.approx(pearson(x, y), abs=1e-9)
        assert correlation(hv(a * np.array(x) + b), h2) == pytest.approx(s, abs=1e-6)
        assert correlation(hv(-a * np.array(x) + b), h2) == pytest.approx(-s, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 256), st.floats(-4, 3), st.integers(0, 2**32 - 1))
def test_guard_constant_error_bound(l, log_scale, seed):
    # S differs from Pearson's r only through the guard constant: |S - r| = |r| xi / (D + xi) <= xi / D
    r = np.random.default_rng(seed)
    x, y = r.normal(0, 10.0**log_scale, (2, l))
    d = math.sqrt(np.sum((x - x.mean()) ** 2) * np.sum((y - y.mean()) ** 2))
    assume(d > 0)
    gap = abs(correlation(hv(x), hv(y)) - pearson(x.tolist(), y.tolist()))
    assert gap <= XI / d + 1e-12
