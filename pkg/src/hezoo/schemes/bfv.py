"""Ring-LWE scheme on ``Z_q[x]/(x^n + 1)`` with ``Delta = floor(q/p)`` message scaling.

Ring elements are lists of ``n`` Python integers, lowest degree first.
Ciphertext components live in ``[0, q)``; the relinearization key lives
mod ``q * l_relin``.  Multiplication tensors the two ciphertexts over the
integers (centered representatives), divides by ``Delta`` with
round-to-nearest, and folds the ``s^2`` component back with the
relinearization key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime

from .. import _kernels, algebra
from ..core import CiphertextEnvelope, NoiseReport, SchemeAdapter, SchemeId, register
from ..errors import ParameterError
from ..rng import RngStream


def round_div(x: int, d: int) -> int:
    """Nearest integer to ``x / d`` for ``d > 0``; halves round up."""
    return (2 * x + d) // (2 * d)


def ntt_friendly_prime(bits: int, n: int, p: int) -> int:
    """Largest prime below ``2^bits`` congruent to 1 modulo ``lcm(2n, p)``."""
    step = math.lcm(2 * n, p)
    k = ((1 << bits) - 2) // step
    while k > 0:
        cand = k * step + 1
        if isprime(cand):
            return cand
        k -= 1
    raise ParameterError("no prime of the requested form")


@dataclass(frozen=True)
class BFVParams:
    n: int
    q: int
    p: int
    l: int | None = None  # noqa: E741  (relinearization factor; default q^2)
    sigma: float = math.sqrt(2 / 3)

    def __post_init__(self):
        if self.n < 1 or self.n & (self.n - 1):
            raise ParameterError("n must be a power of two")
        if not 2 <= self.p < self.q:
            raise ParameterError("need 2 <= p < q")
        if self.l is None:
            object.__setattr__(self, "l", self.q * self.q)
        if self.l < self.q:
            raise ParameterError("relinearization factor must be at least q")

    @property
    def delta(self) -> int:
        return self.q // self.p

    @property
    def rlk_modulus(self) -> int:
        return self.q * self.l

    def to_dict(self) -> dict:
        return {"n": self.n, "q": self.q, "p": self.p, "l": self.l, "sigma": self.sigma}


@dataclass(eq=False)
class BFVKeys:
    params: BFVParams
    s: list = field(repr=False)
    pk: tuple = field(repr=False)
    rlk: tuple = field(repr=False)


# ---------------------------------------------------------------------------
# ring helpers
# ---------------------------------------------------------------------------


def ring_mul_mod(a, b, q: int) -> list[int]:
    return [int(c) for c in _kernels.negacyclic(np.array(a, dtype=object), np.array(b, dtype=object), q)]


def ring_mul_int(a, b) -> list[int]:
    return _kernels.negacyclic_int([int(x) for x in a], [int(x) for x in b])


def ring_add(a, b, q: int | None = None) -> list[int]:
    out = [int(x) + int(y) for x, y in zip(a, b)]
    return [c % q for c in out] if q is not None else out


def ring_mod(a, q: int) -> list[int]:
    return [int(c) % q for c in a]


def ring_centered(a, q: int) -> list[int]:
    return [algebra.centered(int(c), q) for c in a]


def ternary(rng: RngStream, n: int) -> list[int]:
    return [int(v) for v in rng.ternary(n)]


def keygen(params: BFVParams, rng: RngStream) -> BFVKeys:
    n, q = params.n, params.q
    Q = params.rlk_modulus
    s = ternary(rng, n)
    a = [int(v) for v in rng.big_integers(q, n)]
    e = ternary(rng, n)
    pk0 = ring_mod([-(x + y) for x, y in zip(ring_mul_int(a, s), e)], q)
    a2 = [int(v) for v in rng.big_integers(Q, n)]
    e2 = ternary(rng, n)
    s2 = ring_mul_int(s, s)
    rlk0 = ring_mod([-(x + y) + params.l * z for x, y, z in zip(ring_mul_int(a2, s), e2, s2)], Q)
    keys = BFVKeys(params, s, (pk0, a), (rlk0, a2))
    # pk[0] + pk[1] s + e == 0 and rlk[0] + rlk[1] s == l s^2 - e'
    if any(ring_add(ring_add(pk0, ring_mul_int(a, s)), e, q)):
        raise AssertionError("public key identity failed")
    lhs = ring_add(rlk0, ring_mul_int(a2, s), Q)
    rhs = ring_mod([params.l * z - y for z, y in zip(s2, e2)], Q)
    if lhs != rhs:
        raise AssertionError("relinearization key identity failed")
    return keys


def _check_message(m, params: BFVParams) -> list[int]:
    m = [int(v) for v in m]
    if len(m) != params.n:
        raise ParameterError(f"message needs {params.n} coefficients")
    if any(not 0 <= v < params.p for v in m):
        raise ParameterError("message coefficients must lie in [0, p)")
    return m


def encrypt(m, keys: BFVKeys, rng: RngStream, u=None, e1=None, e2=None) -> tuple[list[int], list[int]]:
    """``(pk0 u + Delta m + e1, pk1 u + e2) mod q``; ``u, e1, e2`` may be fixed for testing."""
    p = keys.params
    m = _check_message(m, p)
    u = ternary(rng, p.n) if u is None else list(u)
    e1 = ternary(rng, p.n) if e1 is None else list(e1)
    e2 = ternary(rng, p.n) if e2 is None else list(e2)
    pk0, pk1 = keys.pk
    c0 = ring_add(ring_add(ring_mul_mod(pk0, u, p.q), [p.delta * v for v in m]), e1, p.q)
    c1 = ring_add(ring_mul_mod(pk1, u, p.q), e2, p.q)
    return c0, c1


def planted(m, noise, keys: BFVKeys, rng: RngStream) -> tuple[list[int], list[int]]:
    """A ciphertext whose decryption residue is exactly ``Delta m + noise``."""
    p = keys.params
    m = _check_message(m, p)
    a = [int(v) for v in rng.big_integers(p.q, p.n)]
    c0 = ring_mod(
        [p.delta * mi + int(v) - x for mi, v, x in zip(m, noise, ring_mul_int(a, keys.s))], p.q
    )
    return c0, a


def phase(ct, keys: BFVKeys) -> list[int]:
    """``ct[0] + s ct[1] mod q`` in ``[0, q)``."""
    q = keys.params.q
    return ring_add(ct[0], ring_mul_mod(ct[1], keys.s, q), q)


def decrypt(ct, keys: BFVKeys) -> list[int]:
    """Round ``phase / Delta`` to the nearest integer, then reduce mod p.

    The phase is read in ``[0, q)``.  With ``q = Delta p + r`` and ``r < p``
    the only wrap-around is a negative error on a zero coefficient, which
    shifts that error by ``r``; every error in ``[-Delta/2, Delta/2)``
    decodes correctly.
    """
    p = keys.params
    return [round_div(x, p.delta) % p.p for x in phase(ct, keys)]


def noise(ct, keys: BFVKeys) -> list[int]:
    """Per-coefficient distance from the phase to the nearest multiple of ``Delta``."""
    d = keys.params.delta
    return [x - d * round_div(x, d) for x in phase(ct, keys)]


def noise_report(ct, keys: BFVKeys) -> NoiseReport:
    observed = max(abs(v) for v in noise(ct, keys))
    return NoiseReport(SchemeId.BFV, observed, keys.params.delta / 2, {"delta": keys.params.delta})


def eval_add(ct1, ct2, q: int):
    return ring_add(ct1[0], ct2[0], q), ring_add(ct1[1], ct2[1], q)


def tensor(ct1, ct2, params: BFVParams, integer_domain: bool = True):
    """``(c0, c1, c2)`` before relinearization.

    ``integer_domain=True`` multiplies centered representatives over Z and
    only then divides by ``Delta``.  ``False`` reduces each product mod q
    before dividing, which loses the message once products wrap.
    """
    q, d = params.q, params.delta
    if integer_domain:
        a0, a1 = ring_centered(ct1[0], q), ring_centered(ct1[1], q)
        b0, b1 = ring_centered(ct2[0], q), ring_centered(ct2[1], q)
        raw0 = ring_mul_int(a0, b0)
        raw1 = ring_add(ring_mul_int(a0, b1), ring_mul_int(a1, b0))
        raw2 = ring_mul_int(a1, b1)
    else:
        raw0 = ring_mul_mod(ct1[0], ct2[0], q)
        raw1 = ring_add(ring_mul_mod(ct1[0], ct2[1], q), ring_mul_mod(ct1[1], ct2[0], q), q)
        raw2 = ring_mul_mod(ct1[1], ct2[1], q)
    return tuple([round_div(x, d) % q for x in raw] for raw in (raw0, raw1, raw2))


def relinearize(c, keys: BFVKeys):
    """Fold ``c2 s^2`` into two components using ``round(c2 rlk[j] / l)``."""
    p = keys.params
    q, ell = p.q, p.l
    c0, c1, c2 = c
    c2c = ring_centered(c2, q)
    r0 = [round_div(x, ell) % q for x in ring_mul_int(c2c, keys.rlk[0])]
    r1 = [round_div(x, ell) % q for x in ring_mul_int(c2c, keys.rlk[1])]
    return ring_add(c0, r0, q), ring_add(c1, r1, q)


def eval_mult(ct1, ct2, keys: BFVKeys, integer_domain: bool = True):
    return relinearize(tensor(ct1, ct2, keys.params, integer_domain), keys)


def plaintext_mult(m1, m2, p: int) -> list[int]:
    return [c % p for c in ring_mul_int(m1, m2)]


# ---------------------------------------------------------------------------
# security relation
# ---------------------------------------------------------------------------


def log2_delta(lam: float) -> float:
    """Root-Hermite-factor exponent ``1.8 / (lambda + 100)``."""
    return 1.8 / (lam + 100)


@dataclass(frozen=True)
class SecurityCheck:
    alpha: float
    log2_delta: float
    lhs_bits: float
    rhs_bits: float

    @property
    def margin_bits(self) -> float:
        return self.rhs_bits - self.lhs_bits

    @property
    def passed(self) -> bool:
        return self.lhs_bits < self.rhs_bits


def security_check(n: int, q: int, sigma: float, lam: float, eps: float) -> SecurityCheck:
    """Compare ``log2(alpha q / sigma)`` with ``2 sqrt(n log2 q log2 delta)``.

    ``alpha = sqrt(ln(1/eps) / pi)``; ``eps = 1`` makes ``alpha = 0`` and the
    left side ``-inf``.
    """
    if not 0 < eps <= 1:
        raise ParameterError("eps must lie in (0, 1]")
    if sigma <= 0:
        raise ParameterError("sigma must be positive")
    alpha = math.sqrt(math.log(1 / eps) / math.pi)
    ld = log2_delta(lam)
    lhs = -math.inf if alpha == 0 else math.log2(alpha) + math.log2(q) - math.log2(sigma)
    rhs = 2 * math.sqrt(n * math.log2(q) * ld)
    return SecurityCheck(alpha, ld, lhs, rhs)


# ---------------------------------------------------------------------------
# adapter
# ---------------------------------------------------------------------------


def pack_ring(a, q: int) -> bytes:
    return algebra.pack_coeffs(a, q)


class BFVAdapter(SchemeAdapter):
    scheme_id = SchemeId.BFV
    ops = frozenset({"add", "mult"})

    def params_from_dict(self, d):
        return BFVParams(d["n"], d["q"], d["p"], d.get("l"), float(d.get("sigma", math.sqrt(2 / 3))))

    def params_to_dict(self, params):
        return params.to_dict()

    def keygen(self, params, rng):
        return keygen(params, rng)

    def key_sections(self, keys):
        p = keys.params
        return {
            "secret": bytes(v % 3 for v in keys.s),
            "pk": pack_ring(keys.pk[0], p.q) + pack_ring(keys.pk[1], p.q),
            "rlk": pack_ring(keys.rlk[0], p.rlk_modulus) + pack_ring(keys.rlk[1], p.rlk_modulus),
        }

    def _env(self, ct, q):
        return CiphertextEnvelope(self.scheme_id, pack_ring(ct[0], q) + pack_ring(ct[1], q), arity=2)

    def _ct(self, env, keys):
        self.check_envelope(env)
        p = keys.params
        flat = algebra.unpack_coeffs(env.payload, p.q, 2 * p.n)
        return flat[: p.n], flat[p.n :]

    def encrypt(self, keys, message, rng):
        return self._env(encrypt(message, keys, rng), keys.params.q)

    def decrypt(self, keys, env):
        return decrypt(self._ct(env, keys), keys)

    def evaluate(self, op, envs, keys, extra=None):
        a, b = (self._ct(e, keys) for e in envs[:2])
        if op == "add":
            return self._env(eval_add(a, b, keys.params.q), keys.params.q)
        reduce_first = bool((extra or {}).get("reduce_before_divide", False))
        return self._env(eval_mult(a, b, keys, integer_domain=not reduce_first), keys.params.q)

    def noise_report(self, keys, env):
        return noise_report(self._ct(env, keys), keys)

    def random_message(self, params, rng):
        return [int(v) for v in rng.integers(params.p, params.n)]

    def message_from_json(self, params, value):
        return [int(v) for v in value]

    def messages_equal(self, params, a, b):
        return [int(v) for v in a] == [int(v) for v in b]


ADAPTER = register(BFVAdapter())
