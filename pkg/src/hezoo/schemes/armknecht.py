"""Symmetric somewhat-homomorphic scheme on punctured q-ary Reed-Muller evaluation codes.

A ciphertext is the evaluation of a random low-degree polynomial ``p`` with
``p(y) = m`` on a secret support, plus noise confined to secret bad
locations.  Decryption interpolates on the good locations and evaluates at
``y``.  Addition and Hadamard products act on the underlying polynomials, so
products of up to ``mu`` ciphertexts stay inside the largest code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime, primefactors

from .. import algebra, codes
from ..core import Budget, CiphertextEnvelope, SchemeAdapter, SchemeId, register
from ..errors import BudgetExceeded, GammaExceeded, NoParamsFound, ParameterError, RetriesExhausted
from ..rng import RngStream

T_VARIABLES = 3
KEYGEN_RETRIES = 64


# ---------------------------------------------------------------------------
# parameter formulas
# ---------------------------------------------------------------------------


def rho_search_limit(s: int) -> int:
    return math.ceil((6 * s) ** (1 / 3)) + 4


def log2_n_expression(s: int, mu: int, rho: int) -> float:
    """log2 of ``2^(s / C(3+rho, rho)) * C(3 + 2 mu rho, 3)``."""
    return s / math.comb(3 + rho, rho) + math.log2(math.comb(3 + 2 * mu * rho, 3))


def n_upper_bound(s: int, mu: int) -> float:
    c = (6 * s) ** (1 / 3)
    return 2 ** (6 * s / c**3) * (3 + 2 * mu * c) ** 3


def is_prime_power(q: int) -> bool:
    return q >= 2 and len(primefactors(q)) == 1


def log2_q_condition(q: int, mu: int, rho: int) -> float:
    """log2 of the left-hand side of the minimum-field-size inequality; ``-inf`` when it vanishes."""
    k_tilde = math.comb(3 + 2 * mu * rho, 3)
    total = 0.0
    for j in range(rho + 2):
        num = k_tilde - j
        if num <= 0:
            return -math.inf
        total += math.log2(num) - math.log2(q**3 - j)
    binom = math.comb(q, rho + 2)
    if binom == 0:
        return -math.inf
    return total + 2 * math.log2(q) + math.log2(q * q + q + 1) + math.log2(binom)


@dataclass(frozen=True)
class ParamSearchResult:
    n_min: float
    rho_min: int
    q_min: int

    @property
    def n_min_int(self) -> int:
        # absorb float error so exact integer values do not round up
        return math.ceil(self.n_min * (1 - 1e-12))

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_min_int, self.rho_min, self.q_min)


def param_search(s: int, mu: int, q_cap: int = 1 << 16) -> ParamSearchResult:
    """Minimal length, order and field size against the information-set and low-weight-dual bounds."""
    if s < 1 or mu < 1:
        raise ParameterError("need s >= 1 and mu >= 1")
    best_rho, best_log = None, math.inf
    for rho in range(1, rho_search_limit(s) + 1):
        val = log2_n_expression(s, mu, rho)
        if val < best_log:
            best_rho, best_log = rho, val
    n_min = 2 ** (s / math.comb(3 + best_rho, best_rho)) * math.comb(3 + 2 * mu * best_rho, 3)
    target = -float(s)
    for q in range(best_rho + 2, q_cap + 1):
        if is_prime_power(q) and log2_q_condition(q, mu, best_rho) <= target:
            return ParamSearchResult(n_min, best_rho, q)
    raise NoParamsFound(f"no field size up to {q_cap} satisfies the bound for s={s}, mu={mu}")


# ---------------------------------------------------------------------------
# scheme
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArmknechtParams:
    s: int
    mu: int
    L: int
    q: int
    rho: int
    n: int
    T: int | None = None

    def __post_init__(self):
        if self.T is None:
            object.__setattr__(self, "T", min(self.n - self.L - 1, (self.q + 1) // 2 - 1))
        if not isprime(self.q):
            raise ParameterError("this implementation needs a prime field size")
        if self.mu < 1 or self.rho < 1 or self.L < 0:
            raise ParameterError("need mu >= 1, rho >= 1, L >= 0")
        if 2 * self.mu * self.rho >= self.q:
            raise ParameterError("largest code order 2*mu*rho must stay below q")
        if self.n > self.q**T_VARIABLES:
            raise ParameterError("n exceeds q^3")
        if self.n - self.T < self.L + 1:
            raise ParameterError("need n - T >= L + 1")
        if not 2 * self.T < self.q:
            raise ParameterError("need T < q/2")
        if self.T < 1:
            raise ParameterError("need at least one good location")

    @property
    def t(self) -> int:
        return T_VARIABLES

    def to_dict(self) -> dict:
        return {"s": self.s, "mu": self.mu, "L": self.L, "q": self.q, "rho": self.rho, "n": self.n, "T": self.T}


@dataclass(eq=False)
class ArmknechtKey:
    params: ArmknechtParams
    x: np.ndarray
    y: np.ndarray
    good: tuple[int, ...]
    code_bar: codes.QaryRM = field(repr=False)
    code: codes.QaryRM = field(repr=False)
    code_tilde: codes.QaryRM = field(repr=False)
    budget: Budget = field(repr=False)

    @property
    def bad(self) -> list[int]:
        g = set(self.good)
        return [i for i in range(self.params.n) if i not in g]


@dataclass(frozen=True)
class ArmknechtCiphertext:
    c: np.ndarray
    gamma: int = 1


def _mu_product_check(key_code: codes.QaryRM, tilde: codes.QaryRM, mu: int, rng: RngStream, trials: int = 4) -> bool:
    q = key_code.q
    for _ in range(trials):
        word = np.ones(key_code.n, dtype=np.int64)
        for _ in range(mu):
            coeffs = rng.integers(q, key_code.function_dim)
            word = (word * key_code.evaluate(coeffs)) % q
        if not tilde.code.contains(word):
            return False
    return True


def special_zero_word(key: ArmknechtKey) -> np.ndarray:
    """Everywhere-nonzero codeword of the smallest code that decrypts to 0: ``v_1 - y_1`` on the support."""
    q = key.params.q
    return (key.x[:, 0] - int(key.y[0])) % q


def keygen(params: ArmknechtParams, rng: RngStream) -> ArmknechtKey:
    q, n, t = params.q, params.n, T_VARIABLES
    for _ in range(KEYGEN_RETRIES):
        x = codes.sample_support(q, t, n, rng)
        used = set(int(v) for v in x[:, 0])
        free = [v for v in range(q) if v not in used]
        if not free:
            continue
        y = np.array([free[rng.randbelow(len(free))], rng.randbelow(q), rng.randbelow(q)], dtype=np.int64)
        good = tuple(sorted(rng.sample(n, params.T)))
        bar = codes.build_qary_rm(q, t, params.rho, x)
        mid = codes.build_qary_rm(q, t, 2 * params.rho, x)
        tilde = codes.build_qary_rm(q, t, 2 * params.mu * params.rho, x)
        if not codes.determined_at(good, tilde.eval_matrix, tilde.basis_at(y), q):
            continue
        key = ArmknechtKey(params, x, y, good, bar, mid, tilde, Budget(params.L))
        zero_word = special_zero_word(key)
        if not (np.all(zero_word != 0) and bar.code.contains(zero_word)):
            raise AssertionError("special encoding of zero missing")
        if not _mu_product_check(mid, tilde, params.mu, rng.fork("mu-check")):
            raise AssertionError("mu-fold products left the largest code")
        return key
    raise RetriesExhausted("could not find a support with determined evaluation at y")


def encrypt(m: int, key: ArmknechtKey, rng: RngStream, enforce_budget: bool = True) -> ArmknechtCiphertext:
    p = key.params
    q = p.q
    m = int(m)
    if not 0 <= m < q:
        raise ParameterError("message must lie in [0, q)")
    key.budget.consume(enforce_budget)
    by = key.code.basis_at(key.y)
    space = algebra.solve_linear(by[None, :], [m], q, mode="all")
    mix = rng.integers(q, space.kernel.shape[0])
    coeffs = (space.particular + algebra._kernels.matmul(mix[None, :], space.kernel, q)[0]) % q
    w = key.code.evaluate(coeffs)
    e = np.zeros(p.n, dtype=np.int64)
    bad = key.bad
    e[bad] = rng.integers(q, len(bad))
    return ArmknechtCiphertext((w + e) % q, 1)


def decrypt(ct: ArmknechtCiphertext, key: ArmknechtKey) -> int:
    if ct.gamma > key.params.mu:
        raise GammaExceeded(f"gamma {ct.gamma} exceeds mu {key.params.mu}")
    tilde = key.code_tilde
    return codes.interpolate_eval(ct.c, key.good, tilde.eval_matrix, tilde.basis_at(key.y), key.params.q)


def eval_add(a: ArmknechtCiphertext, b: ArmknechtCiphertext, q: int) -> ArmknechtCiphertext:
    return ArmknechtCiphertext((a.c + b.c) % q, max(a.gamma, b.gamma))


def eval_mult(a: ArmknechtCiphertext, b: ArmknechtCiphertext, q: int, mu: int) -> ArmknechtCiphertext:
    if a.gamma + b.gamma > mu:
        raise BudgetExceeded(f"gamma {a.gamma} + {b.gamma} exceeds mu {mu}")
    return ArmknechtCiphertext((a.c * b.c) % q, a.gamma + b.gamma)


# ---------------------------------------------------------------------------
# adapter
# ---------------------------------------------------------------------------


class ArmknechtAdapter(SchemeAdapter):
    scheme_id = SchemeId.ARMKNECHT
    ops = frozenset({"add", "mult"})

    def params_from_dict(self, d):
        return ArmknechtParams(**{k: d[k] for k in ("s", "mu", "L", "q", "rho", "n")}, T=d.get("T"))

    def params_to_dict(self, params):
        return params.to_dict()

    def keygen(self, params, rng):
        return keygen(params, rng)

    def key_sections(self, key):
        q = key.params.q
        return {
            "support": algebra.pack_coeffs(key.x, q),
            "message_point": algebra.pack_coeffs(key.y, q),
            "good": np.asarray(key.good, dtype="<u4").tobytes(),
        }

    def to_envelope(self, ct: ArmknechtCiphertext, q: int) -> CiphertextEnvelope:
        return CiphertextEnvelope(self.scheme_id, algebra.pack_coeffs(ct.c, q), gamma=ct.gamma, arity=1)

    def from_envelope(self, env: CiphertextEnvelope, params) -> ArmknechtCiphertext:
        self.check_envelope(env)
        c = np.array(algebra.unpack_coeffs(env.payload, params.q, params.n), dtype=np.int64)
        return ArmknechtCiphertext(c, env.gamma)

    def encrypt(self, key, message, rng, enforce_budget=True):
        return self.to_envelope(encrypt(message, key, rng, enforce_budget), key.params.q)

    def decrypt(self, key, env):
        return decrypt(self.from_envelope(env, key.params), key)

    def evaluate(self, op, envs, key, extra=None):
        p = key.params
        a, b = (self.from_envelope(e, p) for e in envs[:2])
        out = eval_add(a, b, p.q) if op == "add" else eval_mult(a, b, p.q, p.mu)
        return self.to_envelope(out, p.q)

    def random_message(self, params, rng):
        return rng.randbelow(params.q)

    def message_from_json(self, params, value):
        return int(value)


ADAPTER = register(ArmknechtAdapter())
