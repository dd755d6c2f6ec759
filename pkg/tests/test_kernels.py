"""The numba and numpy kernels must agree bit for bit, and both must match plain Python."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hezoo import _kernels as K
from hezoo.rng import RngStream

pytestmark = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not importable")

MODULI = [2, 3, 251, 65537, 1073738753, (1 << 31) - 1]


def py_polymul(a, b, q):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += int(x) * int(y)
    return [c % q for c in out]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(MODULI), st.integers(1, 9), st.integers(1, 9), st.integers(1, 9))
def test_matmul_agrees(seed, q, r, k, c):
    rng = RngStream(seed)
    A, B = rng.integers(q, (r, k)), rng.integers(q, (k, c))
    want = (A.astype(object) @ B.astype(object)) % q
    for impl in (K.numba_kernels, K.numpy_kernels):
        assert impl.matmul(A, B, np.int64(q)).tolist() == want.tolist()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(MODULI), st.integers(1, 7), st.integers(1, 9))
def test_rref_agrees(seed, q, r, c):
    from sympy import isprime

    if not isprime(q):
        return
    A = RngStream(seed).integers(q, (r, c))
    R1, p1 = K.numba_kernels.rref(A, np.int64(q))
    R2, p2 = K.numpy_kernels.rref(A, np.int64(q))
    R3, p3 = K._rref_obj(A.astype(object), q)
    assert np.array_equal(R1, R2) and np.array_equal(p1, p2)
    assert R1.tolist() == R3.tolist() and p1.tolist() == p3.tolist()


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(MODULI), st.integers(1, 40), st.integers(1, 40))
def test_polymul_agrees(seed, q, la, lb):
    rng = RngStream(seed)
    a, b = rng.integers(q, la), rng.integers(q, lb)
    want = py_polymul(a, b, q)
    for impl in (K.numba_kernels, K.numpy_kernels):
        assert impl.polymul(a, b, np.int64(q)).tolist() == want


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(MODULI), st.sampled_from([1, 2, 4, 8, 16, 64]))
def test_negacyclic_agrees(seed, q, n):
    rng = RngStream(seed)
    a, b = rng.integers(q, n), rng.integers(q, n)
    want = K.negacyclic_int([int(x) for x in a], [int(x) for x in b], q)
    for impl in (K.numba_kernels, K.numpy_kernels):
        assert impl.negacyclic(a, b, np.int64(q)).tolist() == want


def test_big_modulus_falls_back_to_python_ints():
    q = (1 << 89) - 1
    a, b = [q - 1, 2, 3], [q - 2, 5, 7]
    assert K.negacyclic(a, b, q).tolist() == K.negacyclic_int(a, b, q)
    assert K.polymul(a, b, q).tolist() == py_polymul(a, b, q)


def test_backend_env_var_selects_numpy():
    env = dict(os.environ, HEZOO_BACKEND="numpy")
    out = subprocess.run(
        [sys.executable, "-c", "from hezoo import _kernels; print(_kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_backend_env_var_rejects_unknown():
    env = dict(os.environ, HEZOO_BACKEND="cuda")
    out = subprocess.run([sys.executable, "-c", "import hezoo._kernels"], env=env, capture_output=True, text=True)
    assert out.returncode != 0 and "HEZOO_BACKEND" in out.stderr
