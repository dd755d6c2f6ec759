"""Symmetric scheme on integer polynomials with a prime secret key and a refresh modulus.

Each message bit is hidden as ``y_i = m_i + 2 u_i`` and the polynomial is
masked by a multiple of the secret prime: ``c = y + S_k d``.  Decryption
takes centered residues mod ``S_k`` and then parity, so sums and products
of ciphertexts decrypt to sums and carry-less products in ``F_2[x]`` as
long as every residue stays below ``S_k / 2`` in magnitude.  Reducing a
ciphertext modulo ``R_k = z S_k`` shrinks it without changing any residue.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

from sympy import isprime

from ..core import CiphertextEnvelope, NoiseReport, SchemeAdapter, SchemeId, register
from ..errors import Corrupt, ParameterError
from ..rng import RngStream


def centered_mod(x: int, modulus: int) -> int:
    r = x % modulus
    return r - modulus if 2 * r > modulus else r


@dataclass(frozen=True)
class IntPolyParams:
    ell: int
    a: int = 1
    noise_bits: int = 8
    msg_degree: int = 7

    def __post_init__(self):
        if self.ell < 4:
            raise ParameterError("need ell >= 4")
        if self.a < 1:
            raise ParameterError("need a >= 1")
        if not 0 <= self.noise_bits <= self.ell - 2:
            raise ParameterError("noise_bits must lie in [0, ell-2]")

    @property
    def gamma(self) -> int:
        return max(2, math.ceil(math.log2(self.ell)))

    @property
    def mask_bits(self) -> int:
        return self.ell**self.a

    def to_dict(self) -> dict:
        return {"ell": self.ell, "a": self.a, "noise_bits": self.noise_bits, "msg_degree": self.msg_degree}


@dataclass(frozen=True)
class IntPolyKey:
    params: IntPolyParams
    S_k: int
    z: int

    def __post_init__(self):
        if not isprime(self.S_k):
            raise ParameterError("S_k must be prime")
        if self.z < 2:
            raise ParameterError("z must be at least 2")

    @property
    def R_k(self) -> int:
        return self.z * self.S_k


@dataclass(frozen=True)
class IntPolyCiphertext:
    coeffs: tuple[int, ...]
    noise_bound: int

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def keygen(params: IntPolyParams, rng: RngStream) -> IntPolyKey:
    lo = 1 << (params.ell - 1)
    while True:
        cand = lo + rng.randbelow(lo)
        if isprime(cand):
            break
    g = params.gamma
    z = max(2, (1 << (g - 1)) + rng.randbelow(1 << (g - 1)))
    return IntPolyKey(params, cand, z)


def fresh_noise_bound(params: IntPolyParams) -> int:
    return 1 + 2 * ((1 << params.noise_bits) - 1)


def _bits(msg) -> list[int]:
    bits = [int(b) for b in msg]
    if not bits or any(b not in (0, 1) for b in bits):
        raise ParameterError("message must be a nonempty list of bits")
    return bits


def encrypt(msg, key: IntPolyKey, rng: RngStream, u=None, d=None) -> IntPolyCiphertext:
    """``c = (m + 2u) + S_k d``; ``u`` and ``d`` may be fixed for testing."""
    p = key.params
    bits = _bits(msg)
    n = len(bits)
    if u is None:
        u = [rng.randbits(p.noise_bits) for _ in range(n)]
    if d is None:
        d = [rng.randbits(p.mask_bits) for _ in range(n)]
    u = list(u) + [0] * (n - len(u))
    d = list(d) + [0] * (n - len(d))
    if len(u) != n or len(d) != n:
        raise ParameterError("noise vectors longer than the message")
    coeffs = tuple(b + 2 * ui + key.S_k * di for b, ui, di in zip(bits, u, d))
    bound = max(fresh_noise_bound(p), max(abs(b + 2 * ui) for b, ui in zip(bits, u)))
    return IntPolyCiphertext(coeffs, bound)


def residues(ct: IntPolyCiphertext, key: IntPolyKey) -> list[int]:
    return [centered_mod(c, key.S_k) for c in ct.coeffs]


def decrypt(ct: IntPolyCiphertext, key: IntPolyKey) -> list[int]:
    return [r % 2 for r in residues(ct, key)]


def refresh(ct: IntPolyCiphertext, key: IntPolyKey) -> IntPolyCiphertext:
    return IntPolyCiphertext(tuple(centered_mod(c, key.R_k) for c in ct.coeffs), ct.noise_bound)


def eval_add(c1: IntPolyCiphertext, c2: IntPolyCiphertext) -> IntPolyCiphertext:
    n = max(len(c1.coeffs), len(c2.coeffs))
    a = list(c1.coeffs) + [0] * (n - len(c1.coeffs))
    b = list(c2.coeffs) + [0] * (n - len(c2.coeffs))
    return IntPolyCiphertext(tuple(x + y for x, y in zip(a, b)), c1.noise_bound + c2.noise_bound)


def eval_mult(c1: IntPolyCiphertext, c2: IntPolyCiphertext) -> IntPolyCiphertext:
    out = [0] * (len(c1.coeffs) + len(c2.coeffs) - 1)
    for i, x in enumerate(c1.coeffs):
        if x:
            for j, y in enumerate(c2.coeffs):
                out[i + j] += x * y
    terms = min(len(c1.coeffs), len(c2.coeffs))
    return IntPolyCiphertext(tuple(out), terms * c1.noise_bound * c2.noise_bound)


def gf2_poly_mul(a, b) -> list[int]:
    """Carry-less product of bit polynomials (lowest degree first)."""
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x & 1:
            for j, y in enumerate(b):
                out[i + j] ^= y & 1
    return out


def noise_report(ct: IntPolyCiphertext, key: IntPolyKey) -> NoiseReport:
    observed = max(abs(r) for r in residues(ct, key))
    return NoiseReport(
        SchemeId.INTPOLY, observed, key.S_k / 2, {"tracked_bound": ct.noise_bound, "degree": ct.degree}
    )


# ---------------------------------------------------------------------------
# wire format: [bound][count:4][coeff]*, each integer as [sign:1][len:4][magnitude LE]
# ---------------------------------------------------------------------------


def _pack_int(v: int) -> bytes:
    mag = abs(v)
    body = mag.to_bytes((mag.bit_length() + 7) // 8, "little")
    return struct.pack("<BI", 1 if v < 0 else 0, len(body)) + body


def _unpack_int(data: bytes, pos: int) -> tuple[int, int]:
    if pos + 5 > len(data):
        raise Corrupt("truncated integer header")
    sign, size = struct.unpack_from("<BI", data, pos)
    pos += 5
    if sign > 1 or pos + size > len(data):
        raise Corrupt("bad integer encoding")
    v = int.from_bytes(data[pos : pos + size], "little")
    return (-v if sign else v), pos + size


def pack_ciphertext(ct: IntPolyCiphertext) -> bytes:
    parts = [_pack_int(ct.noise_bound), struct.pack("<I", len(ct.coeffs))]
    parts.extend(_pack_int(c) for c in ct.coeffs)
    return b"".join(parts)


def unpack_ciphertext(data: bytes) -> IntPolyCiphertext:
    bound, pos = _unpack_int(data, 0)
    if pos + 4 > len(data):
        raise Corrupt("truncated coefficient count")
    (count,) = struct.unpack_from("<I", data, pos)
    pos += 4
    coeffs = []
    for _ in range(count):
        v, pos = _unpack_int(data, pos)
        coeffs.append(v)
    if pos != len(data) or count == 0:
        raise Corrupt("trailing or missing coefficient bytes")
    return IntPolyCiphertext(tuple(coeffs), bound)


class IntPolyAdapter(SchemeAdapter):
    scheme_id = SchemeId.INTPOLY
    ops = frozenset({"add", "mult", "refresh"})

    def params_from_dict(self, d):
        return IntPolyParams(d["ell"], d.get("a", 1), d.get("noise_bits", 8), d.get("msg_degree", 7))

    def params_to_dict(self, params):
        return params.to_dict()

    def keygen(self, params, rng):
        return keygen(params, rng)

    def key_sections(self, key):
        return {"S_k": _pack_int(key.S_k), "z": _pack_int(key.z)}

    def _env(self, ct):
        return CiphertextEnvelope(self.scheme_id, pack_ciphertext(ct), arity=1)

    def _ct(self, env):
        self.check_envelope(env)
        return unpack_ciphertext(env.payload)

    def encrypt(self, key, message, rng):
        return self._env(encrypt(message, key, rng))

    def decrypt(self, key, env):
        return decrypt(self._ct(env), key)

    def evaluate(self, op, envs, key, extra=None):
        cts = [self._ct(e) for e in envs]
        if op == "refresh":
            return self._env(refresh(cts[0], key))
        if op == "add":
            return self._env(eval_add(cts[0], cts[1]))
        return self._env(eval_mult(cts[0], cts[1]))

    def noise_report(self, key, env):
        return noise_report(self._ct(env), key)

    def random_message(self, params, rng):
        return [rng.randbelow(2) for _ in range(params.msg_degree + 1)]


ADAPTER = register(IntPolyAdapter())
