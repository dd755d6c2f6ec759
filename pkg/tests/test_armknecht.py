import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hezoo import params as advisor
from hezoo.errors import BudgetExceeded, EncryptionBudgetExceeded, GammaExceeded, NoParamsFound, ParameterError
from hezoo.profiles import scheme_params
from hezoo.rng import RngStream
from hezoo.schemes import armknecht as ak


@pytest.fixture(scope="module")
def params():
    return ak.ArmknechtParams(**scheme_params("armknecht", "desk"))


def fresh_key(params, label="k"):
    return ak.keygen(params, RngStream(label))


def q_condition_exact(q, mu, rho, s):
    """Independent evaluation of the field-size inequality with Fractions."""
    kt = math.comb(3 + 2 * mu * rho, 3)
    lhs = Fraction(q * q * (q * q + q + 1) * math.comb(q, rho + 2))
    for j in range(rho + 2):
        lhs *= Fraction(kt - j, q**3 - j)
    return lhs <= Fraction(1, 2**s)


@pytest.mark.parametrize("s,mu", [(8, 1), (8, 2), (16, 1), (16, 2), (24, 1)])
def test_param_search_minimality(s, mu):
    res = ak.param_search(s, mu)
    rho = res.rho_min
    # rho minimizes the length expression over the documented search range
    vals = {r: ak.log2_n_expression(s, mu, r) for r in range(1, ak.rho_search_limit(s) + 1)}
    assert vals[rho] == min(vals.values())
    # n_min is the ceiling of the displayed expression
    c = math.comb(3 + rho, rho)
    b = math.comb(3 + 2 * mu * rho, 3)
    n = res.n_min_int
    assert n**c >= 2**s * b**c and (n - 1) ** c < 2**s * b**c
    # q_min satisfies the inequality and no smaller prime power does
    assert q_condition_exact(res.q_min, mu, rho, s)
    for q in range(rho + 2, res.q_min):
        if ak.is_prime_power(q):
            assert not q_condition_exact(q, mu, rho, s)


def test_param_search_agrees_with_advisor():
    for s in (8, 12, 16, 20):
        for mu in (1, 2, 3):
            try:
                expected = ak.param_search(s, mu)
            except NoParamsFound:
                with pytest.raises(NoParamsFound):
                    advisor.advise("armknecht", {"s": s, "mu": mu})
                continue
            rep = advisor.advise("armknecht", {"s": s, "mu": mu})
            assert expected.as_tuple() == (rep.derived["n_min"], rep.derived["rho_min"], rep.derived["q_min"])
            assert rep.consistent


def test_param_search_cap():
    with pytest.raises(NoParamsFound):
        ak.param_search(16, 2, q_cap=100)


def test_params_validation():
    with pytest.raises(ParameterError):
        ak.ArmknechtParams(s=8, mu=2, L=20, q=256, rho=1, n=64)  # prime power but not prime
    with pytest.raises(ParameterError):
        ak.ArmknechtParams(s=8, mu=2, L=70, q=251, rho=1, n=64)
    with pytest.raises(ParameterError):
        ak.ArmknechtParams(s=8, mu=3, L=20, q=5, rho=1, n=64)
    p = ak.ArmknechtParams(s=8, mu=2, L=20, q=251, rho=1, n=64)
    assert p.T == min(64 - 20 - 1, 125)


def test_key_structure(params):
    key = fresh_key(params)
    assert len(key.good) == params.T and len(set(key.good)) == params.T
    assert len({tuple(r) for r in key.x.tolist()}) == params.n
    z = ak.special_zero_word(key)
    assert np.all(z != 0)
    assert key.code_bar.code.contains(z)
    assert int(key.y[0]) not in set(key.x[:, 0].tolist())


def test_errors_only_on_bad_locations(params):
    key = fresh_key(params, "bad")
    rng = RngStream("enc")
    ct = ak.encrypt(17, key, rng)
    # the good positions agree with some codeword whose value at y is the message
    tilde = key.code_tilde
    from hezoo import codes

    assert codes.interpolate_eval(ct.c, key.good, key.code.eval_matrix, key.code.basis_at(key.y), params.q) == 17
    assert ak.decrypt(ct, key) == 17
    assert tilde.n == params.n


def test_encryption_budget(params):
    key = fresh_key(params, "budget")
    rng = RngStream("b")
    for _ in range(params.L):
        ak.encrypt(1, key, rng)
    assert key.budget.remaining == 0
    with pytest.raises(EncryptionBudgetExceeded):
        ak.encrypt(1, key, rng)
    ak.encrypt(1, key, rng, enforce_budget=False)


def test_gamma_limits(params):
    key = fresh_key(params, "gamma")
    rng = RngStream("g")
    a, b, c = (ak.encrypt(m, key, rng) for m in (3, 5, 7))
    ab = ak.eval_mult(a, b, params.q, params.mu)
    assert ab.gamma == 2 and ak.decrypt(ab, key) == 15
    with pytest.raises(BudgetExceeded):
        ak.eval_mult(ab, c, params.q, params.mu)
    with pytest.raises(GammaExceeded):
        ak.decrypt(ak.ArmknechtCiphertext(ab.c, 3), key)
    s = ak.eval_add(ab, c, params.q)
    assert s.gamma == 2 and ak.decrypt(s, key) == 22


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 250), st.integers(0, 250), st.integers(0, 250))
def test_homomorphism_property(params, m1, m2, m3):
    key = fresh_key(params, "hyp")
    rng = RngStream(f"h{m1}-{m2}-{m3}")
    c1, c2, c3 = (ak.encrypt(m, key, rng) for m in (m1, m2, m3))
    q = params.q
    expr = ak.eval_add(ak.eval_mult(c1, c2, q, params.mu), c3, q)
    assert ak.decrypt(expr, key) == (m1 * m2 + m3) % q


def test_message_range(params):
    key = fresh_key(params, "range")
    with pytest.raises(ParameterError):
        ak.encrypt(params.q, key, RngStream(0))
