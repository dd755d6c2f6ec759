import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from hezoo.errors import ParameterError
from hezoo.profiles import scheme_params
from hezoo.rng import RngStream
from hezoo.schemes import bogdanovlee as bl


@pytest.fixture(scope="module")
def key():
    return bl.keygen(bl.BLParams(**scheme_params("bogdanov-lee", "desk")), RngStream("bl"))


def test_keygen_prints_notice(capsys):
    bl.keygen(bl.BLParams(n=12, s=6, r=4, q=101, eta=0.0), RngStream(0))
    assert bl.INSECURITY_NOTICE in capsys.readouterr().err


def test_params_validation():
    for kw in (
        dict(n=30, s=8, r=12, q=1048573, eta=0),  # s not divisible by 3
        dict(n=30, s=9, r=3, q=1048573, eta=0),  # r <= s/3
        dict(n=30, s=9, r=12, q=1048575, eta=0),  # q composite
        dict(n=30, s=9, r=12, q=29, eta=0),  # q <= n
        dict(n=30, s=9, r=12, q=1048573, eta=1.5),
    ):
        with pytest.raises(ParameterError):
            bl.BLParams(**kw)


def test_recipe():
    p = bl.recipe(256, 0.25)
    assert p.s % 3 == 0 and p.s >= 3
    assert p.r == int(np.ceil(256 ** (1 - 0.25 / 8)))
    assert sympy.isprime(p.q) and p.q > 256 and p.q >= 2**4 - 1
    with pytest.raises(ParameterError):
        bl.recipe(256, 0.5)


def test_unit_determinant():
    R = bl.unit_determinant_matrix(6, 101, RngStream("det"))
    assert sympy.Matrix(R.tolist()).det() % 101 == 1


def test_secret_rows_are_low_degree(key):
    p = key.params
    for i in range(p.n):
        width = p.s // 3 if i in key.S else p.r
        assert all(int(v) == 0 for v in key.M[i, width:])
        assert int(key.M[i, 0]) == int(key.a[i]) % p.q


def test_annihilator_equations(key):
    q = key.params.q
    y = bl.annihilator(key)
    assert all(int(v) != 0 for v in y)
    assert sum(int(v) for v in y) % q == 1
    MS = key.M[list(key.S)]
    assert all(sum(int(yi) * int(MS[k, j]) for k, yi in enumerate(y)) % q == 0 for j in range(key.params.r))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 1048572), st.integers(0, 1048572))
def test_noiseless_homomorphisms(key, m1, m2):
    q = key.params.q
    rng = RngStream(f"bl-{m1}-{m2}")
    c1, c2 = bl.encrypt(m1, key, rng), bl.encrypt(m2, key, rng)
    assert bl.decrypt(c1, key) == m1
    assert bl.decrypt(bl.eval_add(c1, c2, q), key) == (m1 + m2) % q
    assert bl.decrypt(bl.eval_mult(c1, c2, q), key, degree_cap=2) == m1 * m2 % q


def test_noise_outside_secret_rows_is_harmless(key):
    p = key.params
    e = np.zeros(p.n, dtype=object)
    for i in set(range(p.n)) - set(key.S):
        e[i] = 7
    assert bl.decrypt(bl.encrypt(5, key, RngStream(1), e=e), key) == 5
    e[key.S[0]] = 1
    assert bl.decrypt(bl.encrypt(5, key, RngStream(1), e=e), key) != 5
