import hashlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hezoo.rng import RngStream, normalize_seed, sample_discrete_gaussian


def test_same_seed_same_stream():
    a, b = RngStream(42), RngStream(42)
    assert a.bytes(100) == b.bytes(100)
    assert [a.randbelow(1000) for _ in range(50)] == [b.randbelow(1000) for _ in range(50)]


def test_stream_is_shake256_counter_mode():
    seed = normalize_seed(5)
    block = hashlib.shake_256(b"hezoo-rng-v1" + seed + (0).to_bytes(8, "little")).digest(64)
    assert RngStream(5).bytes(64) == block


def test_fork_depends_only_on_label():
    a = RngStream(1)
    a.bytes(1000)
    assert a.fork("x").bytes(32) == RngStream(1).fork("x").bytes(32)
    assert a.fork("x").bytes(32) != a.fork("y").bytes(32)


def test_seed_validation():
    with pytest.raises(ValueError):
        RngStream(b"short")
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(TypeError):
        RngStream(1.5)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 10**6))
def test_randbelow_in_range(seed, n):
    r = RngStream(seed)
    assert all(0 <= r.randbelow(n) < n for _ in range(20))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 200), st.data())
def test_sample_distinct(seed, n, data):
    k = data.draw(st.integers(0, n))
    s = RngStream(seed).sample(n, k)
    assert len(s) == k == len(set(s)) and all(0 <= x < n for x in s)


def test_sample_huge_population_is_cheap():
    s = RngStream(3).sample(1297**3, 40)
    assert len(set(s)) == 40


def test_permutation_is_uniform_enough():
    counts = np.zeros((3, 3))
    r = RngStream(9)
    for _ in range(3000):
        p = r.permutation(3)
        for i, v in enumerate(p):
            counts[i, v] += 1
    assert np.all(np.abs(counts - 1000) < 120)


def test_integers_uniform_chi_square():
    x = RngStream(11).integers(7, 70000)
    obs = np.bincount(x, minlength=7)
    chi2 = ((obs - 10000) ** 2 / 10000).sum()
    assert chi2 < 22.5  # 0.999 quantile for 6 degrees of freedom


def test_discrete_gaussian_moments():
    x = sample_discrete_gaussian(RngStream(4), 3.2, 20000)
    assert abs(x.mean()) < 0.1
    assert abs(x.std() - 3.2) < 0.1
    assert not sample_discrete_gaussian(RngStream(4), 0, 5).any()


def test_random_floats():
    v = RngStream(2).random(1000)
    assert v.min() >= 0 and v.max() < 1
    assert abs(v.mean() - 0.5) < 0.05
