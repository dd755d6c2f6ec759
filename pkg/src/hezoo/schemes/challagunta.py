"""Two symmetric schemes on binary Reed-Muller codes.

Vector variant: the codeword of a padded message is written at secret
positions of a long random bit vector.  Matrix variant: the message scales
the generator rows, errors confined to a small secret column set are added,
and the entries are shuffled by a secret permutation; decryption sums the
rows and runs the Reed decoder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from math import comb

from .. import algebra, codes
from ..core import CiphertextEnvelope, SchemeAdapter, SchemeId, register
from ..errors import Inconsistent, NotInCode, ParameterError
from ..rng import RngStream


def pack_bits(bits) -> bytes:
    return np.packbits(np.asarray(bits, dtype=np.uint8).reshape(-1), bitorder="little").tobytes()


def unpack_bits(data: bytes, count: int) -> np.ndarray:
    from ..errors import Corrupt

    if len(data) != (count + 7) // 8:
        raise Corrupt(f"expected {(count + 7) // 8} bytes of packed bits")
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")[:count].astype(np.int64)


def as_bits(msg, length: int | None = None) -> np.ndarray:
    bits = np.asarray(msg, dtype=np.int64).reshape(-1)
    if np.any((bits != 0) & (bits != 1)):
        raise ParameterError("message must be a bit vector")
    if length is not None and bits.size != length:
        raise ParameterError(f"message must have {length} bits")
    return bits


# ---------------------------------------------------------------------------
# vector variant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CGVectorParams:
    r: int
    m: int
    p: int
    ell: int
    check_bounds: bool = True

    def __post_init__(self):
        if not 0 <= self.r <= self.m:
            raise ParameterError("need 0 <= r <= m")
        n = 1 << self.m
        k = sum(comb(self.m, i) for i in range(self.r + 1))
        if self.p < 1 or self.p > k:
            raise ParameterError("need 1 <= p <= k")
        if self.ell < n:
            raise ParameterError("ciphertext length must be at least n")
        if self.check_bounds:
            if k < 2 * self.p:
                raise ParameterError(f"need k >= 2p (k={k}, p={self.p})")
            if n < 2 * k:
                raise ParameterError(f"need n >= 2k (n={n}, k={k})")
            if self.ell < n * n:
                raise ParameterError(f"need ell >= n^2 (ell={self.ell}, n={n})")

    def to_dict(self) -> dict:
        return {"r": self.r, "m": self.m, "p": self.p, "ell": self.ell, "check_bounds": self.check_bounds}


@dataclass(frozen=True, eq=False)
class CGVectorKey:
    params: CGVectorParams
    rm: codes.BinaryRM = field(repr=False)
    K: tuple[int, ...]


def cgv_keygen(params: CGVectorParams, rng: RngStream) -> CGVectorKey:
    rm = codes.build_binary_rm(params.r, params.m)
    K = tuple(sorted(rng.sample(params.ell, rm.n)))
    return CGVectorKey(params, rm, K)


def cgv_encrypt(msg, key: CGVectorKey, rng: RngStream) -> np.ndarray:
    p = key.params.p
    bits = as_bits(msg)
    if bits.size > p:
        raise ParameterError(f"message longer than {p} bits")
    padded = np.concatenate([np.zeros(p - bits.size, dtype=np.int64), bits])
    prefix = rng.integers(2, key.rm.k - p)
    w = key.rm.encode(np.concatenate([prefix, padded]))
    c = rng.integers(2, key.params.ell)
    c[list(key.K)] = w
    return c


def cgv_decrypt(c, key: CGVectorKey) -> np.ndarray:
    c = as_bits(c, key.params.ell)
    w = c[list(key.K)]
    try:
        full = key.rm.code.unencode(w)
    except Inconsistent:
        raise NotInCode("embedded word is not a codeword") from None
    return full[key.rm.k - key.params.p :]


def cgv_eval_add(c1, c2) -> np.ndarray:
    return (np.asarray(c1) + np.asarray(c2)) % 2


ANCHOR_MODES = ("first-ciphertext-bit", "first-embedded-position")


def cgv_eval_mult(c1, c2, anchor_mode: str = "first-ciphertext-bit", key: CGVectorKey | None = None) -> np.ndarray:
    """``z_i = x_i y_i + x_i y_a + y_i x_a`` with anchor index ``a`` chosen by ``anchor_mode``."""
    x = np.asarray(c1, dtype=np.int64)
    y = np.asarray(c2, dtype=np.int64)
    if x.shape != y.shape:
        raise ParameterError("ciphertext lengths differ")
    if anchor_mode == "first-ciphertext-bit":
        a = 0
    elif anchor_mode == "first-embedded-position":
        if key is None:
            raise ParameterError("this anchor mode needs the secret positions")
        a = key.K[0]
    else:
        raise ParameterError(f"anchor mode must be one of {ANCHOR_MODES}")
    return (x * y + x * y[a] + y * x[a]) % 2


def cgv_mult_agreement(key: CGVectorKey, rng: RngStream, anchor_mode: str, trials: int | None = None) -> dict:
    """Fraction of message pairs whose product ciphertext decrypts to the bitwise AND.

    Exhaustive over all pairs when ``trials`` is None.
    """
    p = key.params.p
    msgs = [np.array([(v >> (p - 1 - i)) & 1 for i in range(p)], dtype=np.int64) for v in range(1 << p)]
    if trials is None:
        pairs = [(a, b) for a in msgs for b in msgs]
    else:
        pairs = [(msgs[rng.randbelow(len(msgs))], msgs[rng.randbelow(len(msgs))]) for _ in range(trials)]
    agree = not_in_code = 0
    for m1, m2 in pairs:
        z = cgv_eval_mult(cgv_encrypt(m1, key, rng), cgv_encrypt(m2, key, rng), anchor_mode, key)
        try:
            agree += bool(np.array_equal(cgv_decrypt(z, key), m1 * m2))
        except NotInCode:
            not_in_code += 1
    return {
        "anchor_mode": anchor_mode,
        "pairs": len(pairs),
        "agree": agree,
        "not_in_code": not_in_code,
        "rate": agree / len(pairs),
    }


# ---------------------------------------------------------------------------
# matrix variant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CGMatrixParams:
    r: int
    m: int
    bad_count: int

    def __post_init__(self):
        if self.m < 2 or not 0 < self.r <= self.m:
            raise ParameterError("need m >= 2 and 0 < r <= m")
        d = 1 << (self.m - self.r)
        if not 0 < 2 * self.bad_count < d:
            raise ParameterError(f"need 0 < |S1| < d/2 = {d / 2}")

    def to_dict(self) -> dict:
        return {"r": self.r, "m": self.m, "bad_count": self.bad_count}


@dataclass(frozen=True, eq=False)
class CGMatrixKey:
    params: CGMatrixParams
    rm: codes.BinaryRM = field(repr=False)
    S1: tuple[int, ...]
    S2: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rm.k, self.rm.n)


def cgm_keygen(params: CGMatrixParams, rng: RngStream) -> CGMatrixKey:
    rm = codes.build_binary_rm(params.r, params.m)
    S1 = tuple(sorted(rng.sample(rm.n, params.bad_count)))
    S2 = tuple(rng.permutation(rm.k * rm.n))
    return CGMatrixKey(params, rm, S1, S2)


def permute(M, perm) -> np.ndarray:
    flat = np.asarray(M).reshape(-1)
    out = np.empty_like(flat)
    out[np.asarray(perm)] = flat
    return out.reshape(np.asarray(M).shape)


def unpermute(C, perm) -> np.ndarray:
    flat = np.asarray(C).reshape(-1)
    return flat[np.asarray(perm)].reshape(np.asarray(C).shape)


def sample_errors(key: CGMatrixKey, rng: RngStream) -> np.ndarray:
    """Each row gets a uniform nonempty subset of the bad columns."""
    k, n = key.shape
    E = np.zeros((k, n), dtype=np.int64)
    size = len(key.S1)
    masks = rng.integers((1 << size) - 1, k) + 1
    for i, mask in enumerate(masks):
        for b, col in enumerate(key.S1):
            if (int(mask) >> b) & 1:
                E[i, col] = 1
    return E


def cgm_encrypt(msg, key: CGMatrixKey, rng: RngStream, errors=None) -> np.ndarray:
    bits = as_bits(msg, key.rm.k)
    W = (bits[:, None] * key.rm.G) % 2
    E = sample_errors(key, rng) if errors is None else np.asarray(errors, dtype=np.int64) % 2
    return permute((W + E) % 2, key.S2)


def cgm_decrypt(C, key: CGMatrixKey) -> np.ndarray:
    C = np.asarray(C, dtype=np.int64)
    if C.shape != key.shape:
        raise ParameterError(f"ciphertext must be {key.shape[0]}x{key.shape[1]}")
    w = unpermute(C, key.S2).sum(axis=0) % 2
    return codes.reed_decode(w, key.rm)


def cgm_eval_add(C1, C2) -> np.ndarray:
    C1, C2 = np.asarray(C1), np.asarray(C2)
    if C1.shape != C2.shape:
        raise ParameterError("shape mismatch")
    return (C1 + C2) % 2


def cgm_eval_mult(C1, C2) -> np.ndarray:
    C1, C2 = np.asarray(C1), np.asarray(C2)
    if C1.shape != C2.shape:
        raise ParameterError("shape mismatch")
    return (C1 * C2) % 2


# ---------------------------------------------------------------------------
# adapters
# ---------------------------------------------------------------------------


class CGVectorAdapter(SchemeAdapter):
    scheme_id = SchemeId.CG_VECTOR
    ops = frozenset({"add", "mult"})

    def params_from_dict(self, d):
        return CGVectorParams(d["r"], d["m"], d["p"], d["ell"], d.get("check_bounds", True))

    def params_to_dict(self, params):
        return params.to_dict()

    def keygen(self, params, rng):
        return cgv_keygen(params, rng)

    def key_sections(self, key):
        return {"positions": np.asarray(key.K, dtype="<u4").tobytes()}

    def _env(self, c):
        return CiphertextEnvelope(self.scheme_id, pack_bits(c), arity=1)

    def _ct(self, env, key):
        self.check_envelope(env)
        return unpack_bits(env.payload, key.params.ell)

    def encrypt(self, key, message, rng):
        return self._env(cgv_encrypt(message, key, rng))

    def decrypt(self, key, env):
        return [int(b) for b in cgv_decrypt(self._ct(env, key), key)]

    def evaluate(self, op, envs, key, extra=None):
        a, b = (self._ct(e, key) for e in envs[:2])
        if op == "add":
            return self._env(cgv_eval_add(a, b))
        mode = (extra or {}).get("anchor_mode", "first-ciphertext-bit")
        return self._env(cgv_eval_mult(a, b, mode, key))

    def random_message(self, params, rng):
        return [int(b) for b in rng.integers(2, params.p)]

    def messages_equal(self, params, a, b):
        pad = lambda v: [0] * (params.p - len(v)) + list(v)  # noqa: E731
        return pad(a) == pad(b)


class CGMatrixAdapter(SchemeAdapter):
    scheme_id = SchemeId.CG_MATRIX
    ops = frozenset({"add", "mult"})

    def params_from_dict(self, d):
        return CGMatrixParams(d["r"], d["m"], d["bad_count"])

    def params_to_dict(self, params):
        return params.to_dict()

    def keygen(self, params, rng):
        return cgm_keygen(params, rng)

    def key_sections(self, key):
        return {
            "bad_columns": np.asarray(key.S1, dtype="<u4").tobytes(),
            "permutation": np.asarray(key.S2, dtype="<u4").tobytes(),
        }

    def _env(self, C):
        return CiphertextEnvelope(self.scheme_id, pack_bits(C), arity=1)

    def _ct(self, env, key):
        self.check_envelope(env)
        k, n = key.shape
        return unpack_bits(env.payload, k * n).reshape(k, n)

    def encrypt(self, key, message, rng):
        return self._env(cgm_encrypt(message, key, rng))

    def decrypt(self, key, env):
        return [int(b) for b in cgm_decrypt(self._ct(env, key), key)]

    def evaluate(self, op, envs, key, extra=None):
        a, b = (self._ct(e, key) for e in envs[:2])
        return self._env(cgm_eval_add(a, b) if op == "add" else cgm_eval_mult(a, b))

    def random_message(self, params, rng):
        k = sum(comb(params.m, i) for i in range(params.r + 1))
        return [int(b) for b in rng.integers(2, k)]


VECTOR_ADAPTER = register(CGVectorAdapter())
MATRIX_ADAPTER = register(CGMatrixAdapter())
