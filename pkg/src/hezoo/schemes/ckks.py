"""Approximate arithmetic on complex vectors over ``Z[x]/(x^n + 1)``.

A vector ``z`` of ``n/2`` complex numbers is extended to a
conjugate-symmetric vector of length ``n``, scaled by ``Delta`` and
projected onto the integer polynomials through the canonical embedding
``f -> (f(xi), f(xi^3), ..., f(xi^(2n-1)))`` with ``xi = exp(i pi / n)``.
Ciphertexts sit at a level ``l`` of the chain ``q_l = p^l q_0`` and carry
their implicit scale; rescaling divides both by ``p^(l - l')``.

Embedding arithmetic runs in ``numpy.longdouble`` with root tables taken
from ``mpmath``; encoding asserts that the projected coordinates are real
to within a small budget.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .. import algebra
from ..core import CiphertextEnvelope, NoiseReport, SchemeAdapter, SchemeId, register
from ..errors import Corrupt, LevelExhausted, LevelMismatch, ParameterError
from ..rng import RngStream, sample_discrete_gaussian
from .bfv import ring_add, ring_centered, ring_mod, ring_mul_int, round_div

IMAG_BUDGET = 1e-9


# ---------------------------------------------------------------------------
# canonical embedding
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _roots(n: int) -> np.ndarray:
    """``R[k, j] = xi^((2k+1) j)`` as ``clongdouble``."""
    with mpmath.workdps(40):
        table = []
        for t in range(2 * n):
            w = mpmath.exp(1j * mpmath.pi * t / n)
            table.append(np.longdouble(mpmath.nstr(w.real, 35)) + 1j * np.longdouble(mpmath.nstr(w.imag, 35)))
    table = np.array(table, dtype=np.clongdouble)
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    return table[((2 * k + 1) * j) % (2 * n)]


def expand(z) -> np.ndarray:
    """``(z_1, ..., z_{n/2}, conj z_{n/2}, ..., conj z_1)``."""
    z = np.asarray(z, dtype=np.clongdouble)
    return np.concatenate([z, np.conj(z[::-1])])


def embed(coeffs, n: int) -> np.ndarray:
    """All ``n`` evaluations of an integer polynomial at the odd powers of ``xi``."""
    g = np.array([np.longdouble(int(c)) for c in coeffs], dtype=np.longdouble)
    return _roots(n) @ g


def encode(z, delta: float, n: int) -> list[int]:
    """Integer polynomial whose embedding is closest (coordinatewise rounding) to ``Delta pi(z)``."""
    z = np.asarray(z, dtype=np.complex128)
    if z.shape != (n // 2,):
        raise ParameterError(f"message needs {n // 2} complex slots")
    if not np.all(np.isfinite(z)):
        raise ParameterError("message contains non-finite values")
    target = np.longdouble(delta) * expand(z)
    coords = (np.conj(_roots(n)).T @ target) / n
    scale = max(1.0, float(np.max(np.abs(coords))))
    if float(np.max(np.abs(coords.imag))) > IMAG_BUDGET * scale:
        raise AssertionError("projected coordinates are not real; embedding precision exhausted")
    return [int(v) for v in np.rint(coords.real)]


def decode(g, delta: float, n: int) -> np.ndarray:
    """First ``n/2`` embedding values of ``g / Delta``."""
    vals = embed(g, n)[: n // 2] / np.longdouble(delta)
    return vals.astype(np.complex128)


def relative_error(approx, exact) -> float:
    """``||approx - exact||_inf / ||exact||_inf``."""
    exact = np.asarray(exact, dtype=np.complex128)
    denom = float(np.max(np.abs(exact)))
    if denom == 0:
        raise ValueError("relative error of a zero reference")
    return float(np.max(np.abs(np.asarray(approx, dtype=np.complex128) - exact))) / denom


# ---------------------------------------------------------------------------
# parameters and keys
# ---------------------------------------------------------------------------


def _log2_exact(v) -> int | None:
    v = int(v) if float(v).is_integer() else None
    if v is None or v < 1 or v & (v - 1):
        return None
    return v.bit_length() - 1


@dataclass(frozen=True)
class CKKSParams:
    n: int
    delta: float
    p: int
    q0: int
    L: int
    h: int
    P: int | None = None
    sigma: float = 3.2

    def __post_init__(self):
        if self.n < 2 or self.n & (self.n - 1):
            raise ParameterError("n must be a power of two >= 2")
        if not self.delta > 1:
            raise ParameterError("Delta must exceed 1")
        if self.p < 2 or self.q0 < 2 or self.L < 0:
            raise ParameterError("need p >= 2, q0 >= 2 and L >= 0")
        if not 1 <= self.h <= self.n:
            raise ParameterError("need 1 <= h <= n")
        if self.P is None:
            object.__setattr__(self, "P", self.modulus(self.L))
        if self.P < 1 or self.sigma < 0:
            raise ParameterError("need P >= 1 and sigma >= 0")

    def modulus(self, level: int) -> int:
        if not 0 <= level <= self.L:
            raise LevelMismatch(f"level {level} outside [0, {self.L}]")
        return self.p**level * self.q0

    @property
    def q_top(self) -> int:
        return self.modulus(self.L)

    def to_dict(self) -> dict:
        logs = {k: _log2_exact(v) for k, v in (("delta", self.delta), ("p", self.p), ("q0", self.q0), ("P", self.P))}
        d: dict = {"n": self.n, "L": self.L, "h": self.h, "sigma": self.sigma}
        for k, v in (("delta", self.delta), ("p", self.p), ("q0", self.q0), ("P", self.P)):
            if logs[k] is not None:
                d[f"{k}_log2"] = logs[k]
            else:
                d[k] = v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CKKSParams":
        def get(name, as_int=True):
            if f"{name}_log2" in d:
                return 1 << int(d[f"{name}_log2"])
            if name in d:
                return int(d[name]) if as_int else float(d[name])
            return None

        return cls(
            int(d["n"]), float(get("delta", False)), get("p"), get("q0"), int(d["L"]), int(d["h"]),
            get("P"), float(d.get("sigma", 3.2)),
        )


@dataclass(eq=False)
class CKKSKeys:
    params: CKKSParams
    s: list = field(repr=False)
    pk: tuple = field(repr=False)
    evk: tuple = field(repr=False)


@dataclass(frozen=True)
class CKKSCiphertext:
    c0: tuple
    c1: tuple
    level: int
    scale: float


def hwt(rng: RngStream, n: int, h: int) -> list[int]:
    """Exactly ``h`` coefficients in ``{-1, 1}``, the rest zero."""
    s = [0] * n
    for i in rng.sample(n, h):
        s[i] = 1 if rng.randbelow(2) else -1
    return s


def zo(rng: RngStream, n: int, rho: float = 0.5) -> list[int]:
    """``+-1`` with probability ``rho/2`` each, ``0`` otherwise."""
    out = []
    for u in rng.random(n):
        out.append(-1 if u < rho / 2 else (1 if u < rho else 0))
    return out


def gaussian(rng: RngStream, sigma: float, n: int) -> list[int]:
    return [int(v) for v in sample_discrete_gaussian(rng, sigma, n)]


def keygen(params: CKKSParams, rng: RngStream) -> CKKSKeys:
    n, qL, P = params.n, params.q_top, params.P
    s = hwt(rng, n, params.h)
    a = [int(v) for v in rng.big_integers(qL, n)]
    e = gaussian(rng, params.sigma, n)
    pk0 = ring_mod([-x + y for x, y in zip(ring_mul_int(a, s), e)], qL)
    a2 = [int(v) for v in rng.big_integers(P * qL, n)]
    e2 = gaussian(rng, params.sigma, n)
    s2 = ring_mul_int(s, s)
    evk0 = ring_mod([-x + y + P * z for x, y, z in zip(ring_mul_int(a2, s), e2, s2)], P * qL)
    if ring_add(evk0, ring_mul_int(a2, s), P * qL) != ring_mod([P * z + y for z, y in zip(s2, e2)], P * qL):
        raise AssertionError("evaluation key identity failed")
    return CKKSKeys(params, s, (pk0, a), (evk0, a2))


def encrypt_poly(m, keys: CKKSKeys, rng: RngStream, level: int | None = None, scale: float | None = None) -> CKKSCiphertext:
    p = keys.params
    level = p.L if level is None else level
    q = p.modulus(level)
    v = zo(rng, p.n)
    e0 = gaussian(rng, p.sigma, p.n)
    e1 = gaussian(rng, p.sigma, p.n)
    c0 = ring_mod([x + int(mi) + y for x, mi, y in zip(ring_mul_int(v, keys.pk[0]), m, e0)], q)
    c1 = ring_mod([x + y for x, y in zip(ring_mul_int(v, keys.pk[1]), e1)], q)
    return CKKSCiphertext(tuple(c0), tuple(c1), level, float(p.delta if scale is None else scale))


def encrypt(z, keys: CKKSKeys, rng: RngStream, level: int | None = None) -> CKKSCiphertext:
    p = keys.params
    return encrypt_poly(encode(z, p.delta, p.n), keys, rng, level)


def decrypt_poly(ct: CKKSCiphertext, keys: CKKSKeys) -> list[int]:
    q = keys.params.modulus(ct.level)
    return ring_centered(ring_add(ct.c0, ring_mul_int(ct.c1, keys.s)), q)


def decrypt(ct: CKKSCiphertext, keys: CKKSKeys) -> np.ndarray:
    return decode(decrypt_poly(ct, keys), ct.scale, keys.params.n)


def _same_level(ct1: CKKSCiphertext, ct2: CKKSCiphertext):
    if ct1.level != ct2.level:
        raise LevelMismatch(f"levels {ct1.level} and {ct2.level} differ")


def eval_add(ct1: CKKSCiphertext, ct2: CKKSCiphertext, params: CKKSParams) -> CKKSCiphertext:
    _same_level(ct1, ct2)
    if not math.isclose(ct1.scale, ct2.scale, rel_tol=1e-12):
        raise ParameterError("scales differ")
    q = params.modulus(ct1.level)
    return CKKSCiphertext(tuple(ring_add(ct1.c0, ct2.c0, q)), tuple(ring_add(ct1.c1, ct2.c1, q)), ct1.level, ct1.scale)


def tensor(ct1: CKKSCiphertext, ct2: CKKSCiphertext, params: CKKSParams):
    """``(b1 b2, a1 b2 + a2 b1, a1 a2) mod q_l`` with ``b = c0``, ``a = c1``."""
    _same_level(ct1, ct2)
    q = params.modulus(ct1.level)
    d0 = ring_mod(ring_mul_int(ct1.c0, ct2.c0), q)
    d1 = ring_add(ring_mul_int(ct1.c1, ct2.c0), ring_mul_int(ct2.c1, ct1.c0), q)
    d2 = ring_mod(ring_mul_int(ct1.c1, ct2.c1), q)
    return d0, d1, d2


def eval_mult(ct1: CKKSCiphertext, ct2: CKKSCiphertext, keys: CKKSKeys) -> CKKSCiphertext:
    p = keys.params
    d0, d1, d2 = tensor(ct1, ct2, p)
    q = p.modulus(ct1.level)
    d2c = ring_centered(d2, q)
    f0 = [round_div(x, p.P) for x in ring_mul_int(d2c, keys.evk[0])]
    f1 = [round_div(x, p.P) for x in ring_mul_int(d2c, keys.evk[1])]
    return CKKSCiphertext(
        tuple(ring_add(d0, f0, q)), tuple(ring_add(d1, f1, q)), ct1.level, ct1.scale * ct2.scale
    )


def rescale(ct: CKKSCiphertext, new_level: int, params: CKKSParams) -> CKKSCiphertext:
    """``round((q_l' / q_l) c)`` on centered representatives; the scale drops by ``p^(l - l')``."""
    if new_level < 0:
        raise LevelExhausted("no level below 0")
    if new_level >= ct.level:
        raise LevelMismatch("rescale must lower the level")
    q = params.modulus(ct.level)
    q_new = params.modulus(new_level)
    factor = q // q_new
    c0 = [round_div(x, factor) % q_new for x in ring_centered(ct.c0, q)]
    c1 = [round_div(x, factor) % q_new for x in ring_centered(ct.c1, q)]
    return CKKSCiphertext(tuple(c0), tuple(c1), new_level, ct.scale / factor)


def noise_report(ct: CKKSCiphertext, keys: CKKSKeys, reference=None) -> NoiseReport:
    """Residual of the decrypted polynomial against the re-encoded decryption (or a reference poly)."""
    p = keys.params
    g = decrypt_poly(ct, keys)
    ref = reference if reference is not None else encode(decode(g, ct.scale, p.n), ct.scale, p.n)
    observed = max(abs(a - b) for a, b in zip(g, ref))
    return NoiseReport(SchemeId.CKKS, observed, p.modulus(ct.level) / 2, {"scale": ct.scale, "level": ct.level})


# ---------------------------------------------------------------------------
# wire format: [scale:f64][c0 coeffs][c1 coeffs] at width of q_level
# ---------------------------------------------------------------------------


def pack_ciphertext(ct: CKKSCiphertext, params: CKKSParams) -> bytes:
    q = params.modulus(ct.level)
    return struct.pack("<d", ct.scale) + algebra.pack_coeffs(ct.c0, q) + algebra.pack_coeffs(ct.c1, q)


def unpack_ciphertext(data: bytes, level: int, params: CKKSParams) -> CKKSCiphertext:
    if len(data) < 8:
        raise Corrupt("truncated scale")
    (scale,) = struct.unpack_from("<d", data)
    if not (math.isfinite(scale) and scale > 0):
        raise Corrupt("invalid scale")
    q = params.modulus(level)
    flat = algebra.unpack_coeffs(data[8:], q, 2 * params.n)
    return CKKSCiphertext(tuple(flat[: params.n]), tuple(flat[params.n :]), level, scale)


class CKKSAdapter(SchemeAdapter):
    scheme_id = SchemeId.CKKS
    ops = frozenset({"add", "mult", "rescale"})

    def params_from_dict(self, d):
        return CKKSParams.from_dict(d)

    def params_to_dict(self, params):
        return params.to_dict()

    def keygen(self, params, rng):
        return keygen(params, rng)

    def key_sections(self, keys):
        p = keys.params
        qL, Q = p.q_top, p.P * p.q_top
        return {
            "secret": bytes(v % 3 for v in keys.s),
            "pk": algebra.pack_coeffs(keys.pk[0], qL) + algebra.pack_coeffs(keys.pk[1], qL),
            "evk": algebra.pack_coeffs(keys.evk[0], Q) + algebra.pack_coeffs(keys.evk[1], Q),
        }

    def _env(self, ct, params):
        return CiphertextEnvelope(self.scheme_id, pack_ciphertext(ct, params), level=ct.level, arity=2)

    def _ct(self, env, keys):
        self.check_envelope(env)
        if env.level > keys.params.L:
            raise LevelMismatch(f"ciphertext level {env.level} exceeds L={keys.params.L}")
        return unpack_ciphertext(env.payload, env.level, keys.params)

    def encrypt(self, keys, message, rng):
        return self._env(encrypt(message, keys, rng), keys.params)

    def decrypt(self, keys, env):
        return decrypt(self._ct(env, keys), keys)

    def evaluate(self, op, envs, keys, extra=None):
        p = keys.params
        cts = [self._ct(e, keys) for e in envs]
        if op == "rescale":
            target = (extra or {}).get("level", cts[0].level - 1)
            return self._env(rescale(cts[0], int(target), p), p)
        if op == "add":
            return self._env(eval_add(cts[0], cts[1], p), p)
        return self._env(eval_mult(cts[0], cts[1], keys), p)

    def noise_report(self, keys, env):
        return noise_report(self._ct(env, keys), keys)

    def random_message(self, params, rng):
        radius = np.sqrt(rng.random(params.n // 2))
        angle = 2 * np.pi * rng.random(params.n // 2)
        return radius * np.exp(1j * angle)

    def message_from_json(self, params, value):
        return np.array([complex(float(re), float(im)) for re, im in value], dtype=np.complex128)

    def message_to_json(self, params, message):
        return [[float(v.real), float(v.imag)] for v in np.asarray(message, dtype=np.complex128)]

    def messages_equal(self, params, a, b):
        return relative_error(a, b) <= 2.0**-10


ADAPTER = register(CKKSAdapter())
