"""Parameter advice across schemes.

Every inequality is evaluated twice: once in floating-point log space and
once with exact integers and fractions (or 60-digit ``mpmath`` where the
relation involves square roots of logarithms).  The report records both and
whether they agree.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath

from .errors import NoParamsFound, ParameterError

DESK_Q_CAP = 1 << 16


@dataclass
class Check:
    name: str
    passed: bool
    margin: float | None = None
    exact_passed: bool | None = None

    @property
    def agrees(self) -> bool:
        return self.exact_passed is None or self.exact_passed == self.passed


@dataclass
class AdviceReport:
    scheme: str
    inputs: dict
    derived: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return all(c.agrees for c in self.checks)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["consistent"] = self.consistent
        for c in d["checks"]:
            if c["margin"] is not None and not math.isfinite(c["margin"]):
                c["margin"] = str(c["margin"])
        return d


# ---------------------------------------------------------------------------
# armknecht
# ---------------------------------------------------------------------------


def _pow2_times_less(a: Fraction, b: int, a2: Fraction, b2: int) -> bool:
    """Exact test of ``2^a * b < 2^a2 * b2`` for positive integers ``b, b2``."""
    x = a - a2  # compare 2^x with b2/b
    ratio = Fraction(b2, b)
    u, v = x.numerator, x.denominator
    # 2^(u/v) < ratio  <=>  2^u < ratio^v
    left = Fraction(2) ** u
    return left < ratio**v


def exact_rho_min(s: int, mu: int, rho_cap: int) -> int:
    best = None
    for rho in range(1, rho_cap + 1):
        cand = (Fraction(s, math.comb(3 + rho, rho)), math.comb(3 + 2 * mu * rho, 3), rho)
        if best is None or _pow2_times_less(cand[0], cand[1], best[0], best[1]):
            best = cand
    return best[2]


def exact_n_min(s: int, mu: int, rho: int) -> int:
    """Smallest integer ``N >= 2^(s / C(3+rho, rho)) * C(3 + 2 mu rho, 3)``."""
    c = math.comb(3 + rho, rho)
    b = math.comb(3 + 2 * mu * rho, 3)
    # N >= 2^(s/c) b  <=>  N^c >= 2^s b^c
    target = (1 << s) * b**c
    lo, hi = b, b * (1 << (s // c + 1))
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**c >= target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def exact_q_condition(q: int, mu: int, rho: int, s: int) -> bool:
    """``prod_j (k~ - j)/(q^3 - j) * q^2 (q^2+q+1) C(q, rho+2) <= 2^-s`` over the rationals."""
    k_tilde = math.comb(3 + 2 * mu * rho, 3)
    lhs = Fraction(1)
    for j in range(rho + 2):
        if k_tilde - j <= 0:
            return True
        lhs *= Fraction(k_tilde - j, q**3 - j)
    lhs *= q * q * (q * q + q + 1) * math.comb(q, rho + 2)
    return lhs * (1 << s) <= 1


def exact_q_min(s: int, mu: int, rho: int, q_cap: int = DESK_Q_CAP) -> int:
    from .schemes.armknecht import is_prime_power

    for q in range(rho + 2, q_cap + 1):
        if is_prime_power(q) and exact_q_condition(q, mu, rho, s):
            return q
    raise NoParamsFound(f"no field size up to {q_cap} for s={s}, mu={mu}")


def advise_armknecht(inputs: dict) -> AdviceReport:
    from .schemes import armknecht

    s, mu = int(inputs["s"]), int(inputs["mu"])
    q_cap = int(inputs.get("q_cap", DESK_Q_CAP))
    rep = AdviceReport("armknecht", dict(inputs))
    rho_cap = armknecht.rho_search_limit(s)
    rho = exact_rho_min(s, mu, rho_cap)
    n_min = exact_n_min(s, mu, rho)
    q_min = exact_q_min(s, mu, rho, q_cap)
    rep.derived.update({"n_min": n_min, "rho_min": rho, "q_min": q_min, "rho_search_limit": rho_cap})
    logspace = armknecht.param_search(s, mu, q_cap)
    rep.derived["log_space"] = {"n_min": logspace.n_min, "rho_min": logspace.rho_min, "q_min": logspace.q_min}
    same = logspace.as_tuple() == (n_min, rho, q_min)
    rep.checks.append(Check("exact search matches log-space search", same))
    log_lhs = armknecht.log2_q_condition(q_min, mu, rho)
    rep.checks.append(
        Check("field size bound at q_min", log_lhs <= -s, -s - log_lhs, exact_q_condition(q_min, mu, rho, s))
    )
    if q_min > 2:
        below = q_min - 1
        while below > rho + 2 and not armknecht.is_prime_power(below):
            below -= 1
        if armknecht.is_prime_power(below) and below >= rho + 2:
            lb = armknecht.log2_q_condition(below, mu, rho)
            rep.checks.append(
                Check(
                    "bound fails at the next smaller prime power",
                    lb > -s, lb + s, not exact_q_condition(below, mu, rho, s),
                )
            )
    if "n" in inputs and "L" in inputs:
        n, L = int(inputs["n"]), int(inputs["L"])
        q = int(inputs.get("q", q_min))
        T = min(n - L - 1, (q + 1) // 2 - 1)
        rep.derived["T"] = T
        rep.checks.append(Check("n - T >= L + 1", n - T >= L + 1, n - T - L - 1))
        rep.checks.append(Check("n >= n_min", n >= n_min, n - n_min))
    return rep


# ---------------------------------------------------------------------------
# bogdanov-lee
# ---------------------------------------------------------------------------


def advise_bogdanov_lee(inputs: dict) -> AdviceReport:
    from .schemes import bogdanovlee

    n, alpha = int(inputs["n"]), float(inputs["alpha"])
    rep = AdviceReport("bogdanov-lee", dict(inputs))
    p = bogdanovlee.recipe(n, alpha)
    rep.derived.update({"n": p.n, "s": p.s, "r": p.r, "q": p.q, "eta": p.eta, "log2_q": math.log2(p.q)})
    rep.checks.append(Check("s divisible by 3", p.s % 3 == 0))
    rep.checks.append(Check("s/3 < r", p.s // 3 < p.r, p.r - p.s // 3))
    rep.checks.append(Check("log2 q >= n^alpha", math.log2(p.q) >= n**alpha, math.log2(p.q) - n**alpha))
    rep.derived["expected_failure_rate"] = 1 - (1 - p.eta) ** p.s
    rep.warnings.append(bogdanovlee.INSECURITY_NOTICE)
    return rep


# ---------------------------------------------------------------------------
# rank-ideal
# ---------------------------------------------------------------------------


def advise_rank_ideal(inputs: dict) -> AdviceReport:
    from .schemes import rankideal

    w = int(inputs["w"])
    if w < 1:
        raise ParameterError("need w >= 1")
    rep = AdviceReport("rank-ideal", dict(inputs))
    # w(w+3) and w(w+5) are always even
    basic_min = w * (w + 3) // 2 + 2
    operational_min = w * (w + 5) // 2 + 2
    rep.derived.update({"m_min_basic": basic_min, "m_min_operational": operational_min, "max_ciphertexts": 2 * w - 1})
    if "m" in inputs:
        m = int(inputs["m"])
        rep.checks.append(Check("w(w+3)/2 + 1 < m", rankideal.basic_bound_ok(w, m), m - (w * (w + 3) / 2 + 1)))
        rep.checks.append(
            Check("w(w+5)/2 + 2 <= m", rankideal.operational_bound_ok(w, m), m - (w * (w + 5) / 2 + 2))
        )
    rep.warnings.append(
        f"publishing {2 * w} or more ciphertexts under one key exposes the error support; keep below {2 * w}"
    )
    return rep


# ---------------------------------------------------------------------------
# bfv
# ---------------------------------------------------------------------------


def exact_bfv_relation(n: int, q: int, sigma: float, lam: float, eps: float) -> tuple[bool, mpmath.mpf]:
    """The security relation at 60 significant digits; returns (holds, margin in bits)."""
    with mpmath.workdps(60):
        ld = mpmath.mpf("1.8") / (mpmath.mpf(lam) + 100)
        rhs = 2 * mpmath.sqrt(n * mpmath.log(q, 2) * ld)
        if eps == 1:
            return True, mpmath.inf
        alpha = mpmath.sqrt(mpmath.log(1 / mpmath.mpf(eps)) / mpmath.pi)
        lhs = mpmath.log(alpha * q / mpmath.mpf(sigma), 2)
        return bool(lhs < rhs), rhs - lhs


def advise_bfv(inputs: dict) -> AdviceReport:
    from .schemes import bfv

    n, q = int(inputs["n"]), int(inputs["q"])
    sigma = float(inputs.get("sigma", math.sqrt(2 / 3)))
    lam = float(inputs.get("lambda", 128))
    eps = float(inputs.get("eps", 2.0**-64))
    rep = AdviceReport("bfv", dict(inputs))
    chk = bfv.security_check(n, q, sigma, lam, eps)
    exact_ok, exact_margin = exact_bfv_relation(n, q, sigma, lam, eps)
    rep.derived.update(
        {
            "log2_delta": chk.log2_delta,
            "alpha": chk.alpha,
            "lhs_bits": chk.lhs_bits,
            "rhs_bits": chk.rhs_bits,
            "exact_margin_bits": float(exact_margin),
        }
    )
    if "p" in inputs:
        rep.derived["Delta"] = q // int(inputs["p"])
    rep.checks.append(Check("alpha q / sigma < 2^(2 sqrt(n log2 q log2 delta))", chk.passed, chk.margin_bits, exact_ok))
    if not chk.passed:
        rep.warnings.append("parameters fail the lattice security relation; suitable for testing only")
    return rep


# ---------------------------------------------------------------------------
# ckks
# ---------------------------------------------------------------------------


def advise_ckks(inputs: dict) -> AdviceReport:
    from .schemes.ckks import CKKSParams

    p = CKKSParams.from_dict(inputs)
    rep = AdviceReport("ckks", dict(inputs))
    chain = [p.modulus(l) for l in range(p.L + 1)]  # noqa: E741
    rep.derived.update(
        {
            "chain": [str(q) for q in chain],
            "chain_log2": [math.log2(q) for q in chain],
            "P": str(p.P),
            "evk_modulus_log2": math.log2(p.P * p.q_top),
            "levels": p.L,
        }
    )
    increasing = all(a < b for a, b in zip(chain, chain[1:]))
    rep.checks.append(Check("q_l strictly increasing", increasing))
    rep.checks.append(Check("Delta <= q_0", p.delta <= p.q0, math.log2(p.q0) - math.log2(p.delta)))
    rep.checks.append(Check("P >= q_L", p.P >= p.q_top, math.log2(p.P) - math.log2(p.q_top)))
    return rep


ADVISORS = {
    "armknecht": advise_armknecht,
    "bogdanov-lee": advise_bogdanov_lee,
    "rank-ideal": advise_rank_ideal,
    "rank-ideal-additive": advise_rank_ideal,
    "bfv": advise_bfv,
    "ckks": advise_ckks,
}


def advise(scheme: str, inputs: dict) -> AdviceReport:
    try:
        fn = ADVISORS[scheme]
    except KeyError:
        raise NoParamsFound(f"no advisor for scheme {scheme!r}") from None
    return fn(inputs)
