import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hezoo import algebra, codes
from hezoo.errors import ParameterError
from hezoo.profiles import scheme_params
from hezoo.rng import RngStream
from hezoo.schemes import mvideal as mv


@pytest.fixture(scope="module")
def key():
    return mv.keygen(mv.MVIdealParams(**scheme_params("mvideal", "desk")), RngStream("mv"))


def test_params_validation():
    base = scheme_params("mvideal", "desk")
    for change in ({"q": 1048575}, {"p": 0}, {"generators": 2}, {"n": 7}):
        with pytest.raises(ParameterError):
            mv.MVIdealParams(**{**base, **change})
    assert mv.MVIdealParams(**base).N == 6


def test_points_and_secret(key):
    q, a = key.params.q, key.alpha
    vals = codes.monomial_values(key.points, key.exponents, q)  # (N, n)
    gen_vals = algebra._kernels.matmul(key.generators, vals, q)
    assert not gen_vals[:, a:].any()
    assert not key.s[:a].any()
    assert all(1 <= int(v) <= key.params.s_bound for v in key.s[a:])
    rng = RngStream("orth")
    for _ in range(20):
        f = mv.random_ideal_element(key, rng)
        Gf = algebra._kernels.matmul(key.G, f[:, None], q)[:, 0]
        assert sum(int(x) * int(y) for x, y in zip(key.s, Gf)) % q == 0


def test_encrypt_and_add(key):
    rng = RngStream("add")
    for m1 in (0, 1):
        for m2 in (0, 1):
            c1, c2 = mv.encrypt(m1, key, rng), mv.encrypt(m2, key, rng)
            assert mv.decrypt(c1, key) == m1
            assert mv.decrypt(mv.eval_add(c1, c2, key.params.q), key) == m1 ^ m2
    with pytest.raises(ParameterError):
        mv.encrypt(2, key, rng)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1), st.integers(0, 1), st.integers(0, 2**32))
def test_modinv_noise_identity(key, m1, m2, seed):
    rng = RngStream(seed)
    k = key.params.n - key.alpha
    e1 = mv.sample_discrete_gaussian(rng, key.params.sigma, k)
    e2 = mv.sample_discrete_gaussian(rng, key.params.sigma, k)
    c1, c2 = mv.encrypt(m1, key, rng, noise=e1), mv.encrypt(m2, key, rng, noise=e2)
    prod = mv.eval_mult(c1, c2, key, "modinv")
    assert mv.residual_noise(prod, key, m1 * m2) == mv.mult_noise_prediction(key, m1, m2, e1, e2)


def test_round_mode_noiseless(key):
    z = np.zeros(key.params.n - key.alpha, dtype=np.int64)
    rng = RngStream("round")
    for m1 in (0, 1):
        for m2 in (0, 1):
            c = mv.eval_mult(mv.encrypt(m1, key, rng, noise=z), mv.encrypt(m2, key, rng, noise=z), key, "round")
            assert mv.decrypt(c, key) == m1 * m2
    with pytest.raises(ParameterError):
        mv.eval_mult(c, c, key, "floor")
