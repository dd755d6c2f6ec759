import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hezoo.errors import NotInCode, ParameterError
from hezoo.rng import RngStream
from hezoo.schemes import challagunta as cg


@pytest.fixture(scope="module")
def vkey():
    return cg.cgv_keygen(cg.CGVectorParams(2, 5, 4, 1024), RngStream("cgv"))


def test_vector_param_bounds():
    with pytest.raises(ParameterError):
        cg.CGVectorParams(1, 3, 3, 64)  # k = 4 < 2p
    with pytest.raises(ParameterError):
        cg.CGVectorParams(2, 5, 4, 512)  # ell < n^2
    cg.CGVectorParams(2, 5, 4, 512, check_bounds=False)


def test_vector_ciphertext_embeds_codeword(vkey):
    rng = RngStream("emb")
    c = cg.cgv_encrypt([1, 0, 1, 1], vkey, rng)
    assert c.shape == (1024,)
    w = c[list(vkey.K)]
    assert vkey.rm.code.contains(w)
    assert list(cg.cgv_decrypt(c, vkey)) == [1, 0, 1, 1]


def test_vector_decrypt_off_code(vkey):
    c = cg.cgv_encrypt([1, 1, 1, 1], vkey, RngStream("off"))
    c[vkey.K[0]] ^= 1
    with pytest.raises(NotInCode):
        cg.cgv_decrypt(c, vkey)


def test_vector_add_is_xor_exhaustive(vkey):
    rng = RngStream("xor")
    for a in itertools.product([0, 1], repeat=4):
        b = tuple(reversed(a))
        s = cg.cgv_eval_add(cg.cgv_encrypt(a, vkey, rng), cg.cgv_encrypt(b, vkey, rng))
        assert list(cg.cgv_decrypt(s, vkey)) == [x ^ y for x, y in zip(a, b)]


@pytest.mark.parametrize("mode", cg.ANCHOR_MODES)
def test_vector_mult_report_is_well_formed(vkey, mode):
    rep = cg.cgv_mult_agreement(vkey, RngStream("rep"), mode, trials=40)
    assert rep["pairs"] == 40
    assert 0 <= rep["agree"] <= 40 and 0 <= rep["not_in_code"] <= 40 - rep["agree"]
    assert rep["rate"] == rep["agree"] / 40


def test_vector_mult_formula():
    x = np.array([1, 0, 1, 1])
    y = np.array([0, 1, 1, 0])
    # anchor 0: z_i = x_i y_i + x_i y_0 + y_i x_0
    assert cg.cgv_eval_mult(x, y).tolist() == [(x[i] * y[i] + x[i] * y[0] + y[i] * x[0]) % 2 for i in range(4)]
    with pytest.raises(ParameterError):
        cg.cgv_eval_mult(x, y, "first-embedded-position")


def test_matrix_param_bounds():
    with pytest.raises(ParameterError):
        cg.CGMatrixParams(1, 3, 2)  # |S1| must stay below d/2 = 2
    cg.CGMatrixParams(1, 4, 3)


def test_permutation_roundtrip():
    rng = RngStream("perm")
    perm = rng.permutation(12)
    M = rng.integers(2, (3, 4))
    assert np.array_equal(cg.unpermute(cg.permute(M, perm), perm), M)


def test_error_rows_are_nonempty_subsets():
    key = cg.cgm_keygen(cg.CGMatrixParams(1, 4, 3), RngStream("err"))
    rng = RngStream("e")
    for _ in range(50):
        E = cg.sample_errors(key, rng)
        bad = set(key.S1)
        for row in E:
            sup = set(np.nonzero(row)[0].tolist())
            assert sup and sup <= bad


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_matrix_homomorphisms_rm14(seed):
    key = cg.cgm_keygen(cg.CGMatrixParams(1, 4, 2), RngStream(seed))
    rng = RngStream(seed).fork("msgs")
    a, b = rng.integers(2, 5), rng.integers(2, 5)
    A, B = cg.cgm_encrypt(a, key, rng), cg.cgm_encrypt(b, key, rng)
    assert np.array_equal(cg.cgm_decrypt(A, key), a)
    assert np.array_equal(cg.cgm_decrypt(cg.cgm_eval_add(A, B), key), a ^ b)
    assert np.array_equal(cg.cgm_decrypt(cg.cgm_eval_mult(A, B), key), a & b)


def test_matrix_shape_check():
    key = cg.cgm_keygen(cg.CGMatrixParams(1, 3, 1), RngStream("shape"))
    with pytest.raises(ParameterError):
        cg.cgm_decrypt(np.zeros((3, 8)), key)
