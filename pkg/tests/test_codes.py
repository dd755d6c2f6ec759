import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hezoo import algebra, codes
from hezoo.errors import AmbiguousAtY, DecodeAmbiguous, Inconsistent, ParameterError
from hezoo.rng import RngStream


def min_distance(G, q=2):
    best = None
    for msg in itertools.product(range(q), repeat=G.shape[0]):
        if not any(msg):
            continue
        w = int(np.count_nonzero((np.array(msg) @ G) % q))
        best = w if best is None else min(best, w)
    return best


@pytest.mark.parametrize("r,m", [(0, 3), (1, 3), (2, 3), (1, 4), (2, 4)])
def test_binary_rm_parameters(r, m):
    rm = codes.build_binary_rm(r, m)
    assert rm.n == 2**m
    assert rm.k == sum(comb(m, i) for i in range(r + 1))
    assert rm.d == 2 ** (m - r) == min_distance(rm.G)


def test_rm_rows_are_monomial_evaluations():
    rm = codes.build_binary_rm(2, 3)
    for row, mono in zip(rm.G, rm.monomials):
        for j in range(rm.n):
            x = rm.point(j)
            assert row[j] == int(all(x[v] for v in mono))


@pytest.mark.parametrize("r,m", [(1, 3), (1, 4), (2, 4), (1, 5)])
def test_reed_decode_within_radius(r, m):
    rm = codes.build_binary_rm(r, m)
    t = (rm.d - 1) // 2
    rng = RngStream(f"reed-{r}-{m}")
    for _ in range(300):
        msg = rng.integers(2, rm.k)
        err = np.zeros(rm.n, dtype=np.int64)
        err[rng.sample(rm.n, rng.randbelow(t + 1))] = 1
        assert np.array_equal(codes.reed_decode((rm.encode(msg) + err) % 2, rm), msg)


def test_reed_decode_never_silently_wrong_beyond_radius():
    # words at distance >= d/2 from every codeword: either flagged or decoded to some codeword
    rm = codes.build_binary_rm(1, 3)
    words = [np.array(w) for w in itertools.product([0, 1], repeat=8)]
    cw = [rm.encode(np.array(m)) for m in itertools.product([0, 1], repeat=rm.k)]
    far = [w for w in words if min(int(((w + c) % 2).sum()) for c in cw) * 2 >= rm.d]
    assert far
    for w in far:
        try:
            msg = codes.reed_decode(w, rm)
        except DecodeAmbiguous:
            continue
        assert 2 * int(((rm.encode(msg) + w) % 2).sum()) < rm.d


def test_reed_decode_rejects_bad_length():
    with pytest.raises(ParameterError):
        codes.reed_decode(np.zeros(7), codes.build_binary_rm(1, 3))


def test_linear_code_syndrome_and_unencode():
    rm = codes.build_binary_rm(1, 4)
    msg = np.array([1, 0, 1, 1, 0])
    c = rm.encode(msg)
    assert rm.code.contains(c)
    assert np.array_equal(rm.code.unencode(c), msg)
    c[0] ^= 1
    assert not rm.code.contains(c)
    with pytest.raises(Inconsistent):
        rm.code.unencode(c)


def test_exponent_tuples_count():
    for t in (1, 2, 3):
        for d in range(5):
            assert len(codes.exponent_tuples(t, d)) == comb(t + d, d)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([5, 7, 11]), st.integers(1, 3))
def test_qary_rm_evaluate_matches_direct(seed, q, rho):
    rng = RngStream(seed)
    t = 2
    pts = codes.sample_support(q, t, 8, rng)
    rm = codes.build_qary_rm(q, t, rho, pts)
    coeffs = rng.integers(q, rm.function_dim)
    got = rm.evaluate(coeffs)
    for j, p in enumerate(pts):
        want = sum(int(c) * pow(int(p[0]), e[0], q) * pow(int(p[1]), e[1], q) for c, e in zip(coeffs, rm.exponents)) % q
        assert got[j] == want


def test_qary_rm_rejects_bad_support():
    with pytest.raises(ParameterError):
        codes.build_qary_rm(5, 2, 1, np.array([[0, 0], [0, 0]]))
    with pytest.raises(ParameterError):
        codes.build_qary_rm(5, 2, 5, np.array([[0, 0]]))


def test_interpolation_recovers_polynomial_value():
    q, t, rho = 11, 2, 2
    rng = RngStream("interp")
    pts = codes.sample_support(q, t, 12, rng)
    rm = codes.build_qary_rm(q, t, rho, pts)
    coeffs = rng.integers(q, rm.function_dim)
    y = np.array([3, 4])
    vals = rm.evaluate(coeffs)
    want = int(rm.evaluate(coeffs, y[None, :])[0])
    assert codes.interpolate_eval(vals, range(12), rm.eval_matrix, rm.basis_at(y), q) == want
    # too few positions leave the value at y undetermined
    assert not codes.determined_at([0, 1], rm.eval_matrix, rm.basis_at(y), q)
    with pytest.raises(AmbiguousAtY):
        codes.interpolate_eval(vals, [0, 1], rm.eval_matrix, rm.basis_at(y), q)


@pytest.mark.parametrize("q,m,n", [(2, 4, 3), (3, 3, 4), (2, 5, 5)])
def test_ideal_code_duality_and_blocks(q, m, n):
    F = algebra.FieldCtx(q, m)
    ring = algebra.RingCtx(q, ring_poly=algebra.find_irreducible(q, n))
    rng = RngStream(f"ideal-{q}-{m}-{n}")
    for s in (2, 3):
        gens = [algebra.ExtVector(F, F.random(rng, n)) for _ in range(s - 1)]
        code = codes.build_ideal_code(gens, ring)
        assert code.G.shape[:2] == (n, s * n)
        assert code.check_duality()
        for b, g in zip(code.blocks, gens):
            assert np.array_equal(b, algebra.ideal_matrix(g, ring))


def test_ideal_code_over_base_field():
    ring = algebra.RingCtx(2, ring_poly=(1, 1, 0, 1))
    code = codes.build_ideal_code([np.array([1, 1, 0])], ring)
    assert not algebra._kernels.matmul(code.H, code.G.T, 2).any()
    with pytest.raises(ParameterError):
        codes.build_ideal_code([], ring)
