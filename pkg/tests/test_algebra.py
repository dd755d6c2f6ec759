import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem

from hezoo import algebra
from hezoo.errors import Inconsistent, ParameterError
from hezoo.rng import RngStream

FIELDS = [(2, 4), (3, 3), (5, 2), (7, 1)]


def sympy_field_mul(a, b, f, q):
    """F_q[x]/f product computed by sympy (which stores highest degree first)."""
    hi = lambda v: [int(c) for c in reversed(list(v))]  # noqa: E731
    r = gf_rem(gf_mul(hi(a), hi(b), q, ZZ), hi(f), q, ZZ)
    out = list(reversed([int(c) for c in r]))
    return out + [0] * (len(f) - 1 - len(out))


@pytest.mark.parametrize("q,m", FIELDS)
def test_field_mul_matches_sympy(q, m):
    F = algebra.FieldCtx(q, m)
    rng = RngStream(f"fmul-{q}-{m}")
    A, B = F.random(rng, 60), F.random(rng, 60)
    got = F.mul(A, B)
    f = F.modulus_poly if m > 1 else (0, 1)
    for a, b, g in zip(A, B, got):
        assert list(g) == sympy_field_mul(a, b, f, q)


@pytest.mark.parametrize("q,m", FIELDS)
def test_field_inverse_and_group_order(q, m):
    F = algebra.FieldCtx(q, m)
    one = F.one
    for x in F.elements():
        if x.is_zero():
            continue
        assert x * x.inverse() == one
        assert x ** (q**m - 1) == one


@pytest.mark.parametrize("q,m", [(2, 2), (2, 5), (3, 2), (3, 4), (5, 3)])
def test_find_irreducible_is_first_irreducible(q, m):
    f = algebra.find_irreducible(q, m)
    assert gf_irreducible_p(list(reversed(f)), q, ZZ)
    for idx in range(1, q**m):
        low = [(idx // q**i) % q for i in range(m)]
        cand = tuple(low + [1])
        if cand == f:
            break
        if low[0]:
            assert not gf_irreducible_p(list(reversed(cand)), q, ZZ)


def test_reducible_modulus_rejected():
    with pytest.raises(ParameterError):
        algebra.FieldCtx(2, 2, (1, 0, 1))
    with pytest.raises(ParameterError):
        algebra.FieldCtx(4, 1)


def _bruteforce_rank(A, q):
    rows = [tuple(int(v) % q for v in r) for r in A]
    span = {tuple([0] * A.shape[1])}
    for r in rows:
        span = {tuple((s + c * x) % q for s, x in zip(v, r)) for v in span for c in range(q)}
    d = 0
    while q**d < len(span):
        d += 1
    return d


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(1, 5))
def test_rank_matches_enumeration(seed, q, r, c):
    A = RngStream(seed).integers(q, (r, c))
    assert algebra.rank(A, q) == _bruteforce_rank(A, q)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3, 7, 251, 1048573]), st.integers(1, 6))
def test_inverse_and_det(seed, q, n):
    rng = RngStream(seed)
    A = rng.integers(q, (n, n))
    d = algebra.det(A, q)
    assert d == int(Matrix(A.tolist()).det()) % q
    if d:
        inv = algebra.inverse(A, q)
        assert np.array_equal(algebra._kernels.matmul(A, inv, q), np.eye(n, dtype=np.int64))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([2, 3, 11]), st.integers(1, 5), st.integers(1, 6))
def test_nullspace_and_solve(seed, q, r, c):
    rng = RngStream(seed)
    A = rng.integers(q, (r, c))
    N = algebra.nullspace(A, q)
    assert N.shape[0] == c - algebra.rank(A, q)
    if N.size:
        assert not algebra._kernels.matmul(A, N.T, q).any()
    x0 = rng.integers(q, c)
    b = algebra._kernels.matmul(A, x0[:, None], q)[:, 0]
    sol = algebra.solve_linear(A, b, q, mode="all")
    assert np.array_equal(algebra._kernels.matmul(A, sol.particular[:, None], q)[:, 0], b)


def test_solve_inconsistent():
    with pytest.raises(Inconsistent):
        algebra.solve_linear([[1, 0], [1, 0]], [0, 1], 2)


def test_large_modulus_uses_exact_path():
    q = (1 << 61) - 1
    A = np.array([[3, 5], [7, 11]], dtype=object)
    inv = algebra.inverse(A, q)
    prod = (A @ inv) % q
    assert prod.tolist() == [[1, 0], [0, 1]]


@pytest.mark.parametrize("q,m", [(2, 4), (3, 3)])
def test_rank_weight_properties(q, m):
    F = algebra.FieldCtx(q, m)
    rng = RngStream("rw")
    for _ in range(50):
        n = 1 + rng.randbelow(6)
        v = algebra.ExtVector(F, F.random(rng, n))
        w = algebra.rank_weight(v)
        assert 0 <= w <= min(n, m)
        assert algebra.rank_weight(v.scale(F.random(rng, 1)[0])) <= w
        assert algebra.rank_weight(v) >= (1 if not v.is_zero() else 0)
    assert algebra.rank_weight(algebra.ExtVector.zeros(F, 4)) == 0


def test_rank_weight_invariant_under_nonzero_scalar():
    F = algebra.FieldCtx(2, 4)
    rng = RngStream("rw-scale")
    for _ in range(30):
        v = algebra.ExtVector(F, F.random(rng, 5))
        c = F.random(rng, 1)[0]
        if not c.any():
            continue
        assert algebra.rank_weight(v.scale(c)) == algebra.rank_weight(v)


def test_vector_product_is_ring_multiplication():
    q, n = 3, 4
    f = algebra.find_irreducible(q, n)
    ring = algebra.RingCtx(q, ring_poly=f)
    rng = RngStream("vp")
    for _ in range(30):
        u, v = rng.integers(q, n), rng.integers(q, n)
        got = algebra.vector_product(u, v, ring)
        assert list(got) == sympy_field_mul(u, v, f, q)
        assert np.array_equal(got, algebra.vector_product(v, u, ring))


def test_vector_product_over_extension_is_bilinear():
    F = algebra.FieldCtx(2, 4)
    ring = algebra.RingCtx(2, ring_poly=algebra.find_irreducible(2, 3))
    rng = RngStream("vp-ext")
    for _ in range(20):
        a, b, c = (algebra.ExtVector(F, F.random(rng, 3)) for _ in range(3))
        left = algebra.vector_product(a + b, c, ring)
        right = algebra.vector_product(a, c, ring) + algebra.vector_product(b, c, ring)
        assert left == right


def test_ideal_matrix_rows():
    ring = algebra.RingCtx(2, ring_poly=(1, 1, 0, 1))
    v = np.array([1, 0, 1])
    M = algebra.ideal_matrix(v, ring)
    for i in range(3):
        e = np.zeros(3, dtype=np.int64)
        e[i] = 1
        assert np.array_equal(M[i], algebra.vector_product(e, v, ring))


def test_negacyclic_ring():
    ring = algebra.RingCtx(17, degree=4)
    a = ring.element([1, 2, 3, 4])
    b = ring.element([0, 1, 0, 0])  # multiplication by x
    assert list((a * b).coeffs) == [(-4) % 17, 1, 2, 3]
    with pytest.raises(ParameterError):
        algebra.RingCtx(17, degree=6)


def test_pack_roundtrip():
    for q in (2, 251, 65537, (1 << 61) - 1):
        vals = [0, 1, q - 1, q // 2]
        assert algebra.unpack_coeffs(algebra.pack_coeffs(vals, q), q, len(vals)) == vals


def test_exhaustive_small_field_tables():
    F = algebra.FieldCtx(2, 3)
    elems = list(F.elements())
    assert len(elems) == 8
    for x, y in itertools.product(elems, repeat=2):
        assert (x * y) == (y * x)
        assert (x + y) - y == x
