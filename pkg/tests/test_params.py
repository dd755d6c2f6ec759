import json
import math

import pytest

from hezoo import params as advisor
from hezoo.errors import NoParamsFound, ParameterError
from hezoo.schemes import bogdanovlee


def test_bfv_report():
    rep = advisor.advise("bfv", {"n": 16, "q": 1073738753, "p": 256})
    assert rep.derived["log2_delta"] == pytest.approx(1.8 / 228)
    assert rep.derived["Delta"] == 1073738753 // 256
    (chk,) = rep.checks
    assert not chk.passed and chk.margin == pytest.approx(rep.derived["exact_margin_bits"], abs=1e-9)
    assert rep.consistent and rep.warnings


def test_bfv_large_ring_passes():
    rep = advisor.advise("bfv", {"n": 2048, "q": 2**54, "sigma": 3.2})
    assert rep.checks[0].passed and rep.checks[0].exact_passed


@pytest.mark.parametrize("w", [1, 2, 3, 4])
def test_rank_ideal_minimum_m(w):
    from hezoo.schemes import rankideal

    rep = advisor.advise("rank-ideal", {"w": w})
    pm, om = rep.derived["m_min_basic"], rep.derived["m_min_operational"]
    assert rankideal.basic_bound_ok(w, pm) and not rankideal.basic_bound_ok(w, pm - 1)
    assert rankideal.operational_bound_ok(w, om) and not rankideal.operational_bound_ok(w, om - 1)
    assert rep.derived["max_ciphertexts"] == 2 * w - 1


def test_rank_ideal_values_for_w2():
    rep = advisor.advise("rank-ideal", {"w": 2, "m": 8})
    assert (rep.derived["m_min_basic"], rep.derived["m_min_operational"]) == (7, 9)
    assert [c.passed for c in rep.checks] == [True, False]
    with pytest.raises(ParameterError):
        advisor.advise("rank-ideal", {"w": 0})


def test_bogdanov_lee_recipe_report():
    rep = advisor.advise("bogdanov-lee", {"n": 256, "alpha": 0.25})
    p = bogdanovlee.recipe(256, 0.25)
    assert rep.derived["q"] == p.q
    assert rep.derived["expected_failure_rate"] == pytest.approx(1 - (1 - p.eta) ** p.s)
    assert all(c.passed for c in rep.checks)
    assert bogdanovlee.INSECURITY_NOTICE in rep.warnings


def test_ckks_chain():
    rep = advisor.advise("ckks", {"n": 16, "L": 2, "h": 8, "delta_log2": 25, "p_log2": 25, "q0_log2": 30})
    assert rep.derived["chain_log2"] == [30.0, 55.0, 80.0]
    assert all(c.passed for c in rep.checks)
    bad = advisor.advise("ckks", {"n": 16, "L": 2, "h": 8, "delta_log2": 35, "p_log2": 25, "q0_log2": 30, "P_log2": 40})
    assert [c.name for c in bad.checks if not c.passed] == ["Delta <= q_0", "P >= q_L"]


def test_unknown_scheme():
    with pytest.raises(NoParamsFound):
        advisor.advise("intpoly", {})


def test_report_serializes():
    rep = advisor.advise("bfv", {"n": 16, "q": 1073738753, "eps": 1.0})
    d = json.loads(json.dumps(rep.to_dict()))
    assert d["consistent"] and d["scheme"] == "bfv"
    assert rep.derived["exact_margin_bits"] == math.inf
