"""Symmetric somewhat-homomorphic scheme from random rank-metric ideal codes.

Vectors live in ``F_{q^m}^n`` and multiply through ``F_{q^m}[X]/<f_n>``.
A ciphertext ``(u, v)`` satisfies ``v - s.u = e + g_1 msg`` where every
coordinate of ``e`` lies in the secret low-rank space ``X = span(x)``.
Decryption reads the ``g_1``-coordinate in a basis that puts all error
products in a span ``Xbar`` disjoint from ``g_1`` and ``g_2 = g_1^2``; one
multiplication therefore decrypts through the ``g_2``-coordinate.

The additive variant drops the product spans and only needs ``w < m``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .. import algebra, codes
from ..algebra import ExtVector, FieldCtx, RingCtx
from ..core import CiphertextEnvelope, SchemeAdapter, SchemeId, register
from ..errors import ParameterError, RetriesExhausted, UnsupportedOp
from ..rng import RngStream

KEYGEN_RETRIES = 200


class ExposureWarning(UserWarning):
    """Enough ciphertexts were published under one key to make key recovery polynomial."""


def basic_bound_ok(w: int, m: int) -> bool:
    """``w(w+3)/2 + 1 < m``."""
    return w * (w + 3) / 2 + 1 < m


def operational_bound_ok(w: int, m: int) -> bool:
    """``w(w+5)/2 + 2 <= m``: room for ``x``, ``g_1 x``, the products ``x_i x_j``, ``g_1`` and ``g_2``."""
    return w * (w + 5) // 2 + 2 <= m


@dataclass(frozen=True)
class RankIdealParams:
    q: int
    m: int
    n: int
    w: int
    additive: bool = False
    field_poly: tuple[int, ...] | None = None
    ring_poly: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.w < 1 or self.n < 1:
            raise ParameterError("need w >= 1 and n >= 1")
        if self.additive:
            if not self.w < self.m:
                raise ParameterError("additive variant needs w < m")
        elif not operational_bound_ok(self.w, self.m):
            raise ParameterError(
                f"need w(w+5)/2 + 2 <= m (w={self.w}, m={self.m}); "
                f"basic bound w(w+3)/2 + 1 < m is {'met' if basic_bound_ok(self.w, self.m) else 'not met'}"
            )

    @property
    def scheme_id(self) -> SchemeId:
        return SchemeId.RANK_IDEAL_ADDITIVE if self.additive else SchemeId.RANK_IDEAL

    def field_ctx(self) -> FieldCtx:
        return FieldCtx(self.q, self.m, self.field_poly)

    def ring(self) -> RingCtx:
        f = self.ring_poly if self.ring_poly is not None else algebra.find_irreducible(self.q, self.n)
        return RingCtx(self.q, ring_poly=f)

    def to_dict(self) -> dict:
        F, R = self.field_ctx(), self.ring()
        return {
            "q": self.q,
            "m": self.m,
            "n": self.n,
            "w": self.w,
            "field_poly": list(F.modulus_poly),
            "ring_poly": list(R.ring_poly),
        }


@dataclass(eq=False)
class RankIdealKey:
    params: RankIdealParams
    fctx: FieldCtx = dc_field(repr=False)
    ring: RingCtx = dc_field(repr=False)
    x: ExtVector = dc_field(repr=False)
    g: ExtVector = dc_field(repr=False)
    basis: np.ndarray = dc_field(repr=False)
    D: np.ndarray = dc_field(repr=False)
    s: ExtVector = dc_field(repr=False)
    span_dim: int = 0
    published: int = 0

    @property
    def B(self) -> np.ndarray:
        """``Mat(b)``: column ``i`` holds ``vec(b_i)``."""
        return self.basis.T

    @property
    def g1_extractor(self) -> np.ndarray:
        return self.D[:, 0]

    @property
    def g2_extractor(self) -> np.ndarray:
        if self.params.additive:
            raise UnsupportedOp("additive keys have no product extractor")
        return self.D[:, 1]

    @property
    def error_span(self) -> ExtVector:
        """Echelon basis of the span that decryption ignores (``Xbar``, or ``X`` for the additive variant)."""
        return ExtVector(self.fctx, self.basis[: self.span_dim])


@dataclass(frozen=True, eq=False)
class RankIdealCiphertext:
    parts: tuple[ExtVector, ...]

    @property
    def arity(self) -> int:
        return len(self.parts)


def _random_full_rank(F: FieldCtx, count: int, rng: RngStream) -> ExtVector:
    for _ in range(KEYGEN_RETRIES):
        v = ExtVector(F, F.random(rng, count))
        if algebra.rank_weight(v) == count:
            return v
    raise RetriesExhausted("could not sample a full-rank-weight vector")


def _extend_to_basis(F: FieldCtx, rows: np.ndarray, rng: RngStream) -> np.ndarray:
    """Append random elements until the rows span ``F_q^m``."""
    q, m = F.q, F.m
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, m)
    current = algebra.rank(rows, q) if len(rows) else 0
    if current != len(rows):
        raise ParameterError("rows to extend are not independent")
    tries = 0
    while len(rows) < m:
        cand = F.random(rng, 1)
        if algebra.rank(np.vstack([rows, cand]), q) == len(rows) + 1:
            rows = np.vstack([rows, cand])
        tries += 1
        if tries > 50 * m:
            raise RetriesExhausted("basis extension failed")
    return rows


def _dual_columns(basis_rows: np.ndarray, q: int, first: int) -> np.ndarray:
    """Columns ``first..m-1`` of ``(B^-1)^T`` for ``B = Mat(b)``."""
    B = basis_rows.T
    Binv = algebra.inverse(B, q)
    return Binv.T[:, first:].copy()


def _sample_secret(F: FieldCtx, x: ExtVector, n: int, rng: RngStream) -> ExtVector:
    for _ in range(KEYGEN_RETRIES):
        coeffs = rng.integers(F.q, (n, len(x)))
        s = algebra._kernels.matmul(coeffs, x.coords, F.q)
        if s.any():
            return ExtVector(F, s)
    raise RetriesExhausted("secret kept coming out zero")


def product_span(x: ExtVector, g1) -> np.ndarray:
    """Echelon basis of ``span({x_i} u {g_1 x_i} u {x_i x_j})``."""
    F = x.ctx
    w = len(x)
    parts = [x.coords, F.mul(x.coords, g1)]
    prods = [F.mul(x.coords[i], x.coords[j]) for i in range(w) for j in range(i, w)]
    parts.append(np.array(prods, dtype=np.int64).reshape(-1, F.m))
    return algebra.row_basis(np.vstack(parts), F.q)


def keygen(params: RankIdealParams, rng: RngStream) -> RankIdealKey:
    if params.additive:
        return keygen_additive(params, rng)
    F, R = params.field_ctx(), params.ring()
    for _ in range(KEYGEN_RETRIES):
        g1 = F.random(rng, 1)[0]
        if not g1.any():
            continue
        x = _random_full_rank(F, params.w, rng)
        a = product_span(x, g1)
        d = a.shape[0]
        g2 = F.mul(g1, g1)
        head = np.vstack([a, g1[None, :], g2[None, :]])
        if algebra.rank(head, F.q) != d + 2:
            continue
        basis = _extend_to_basis(F, head, rng)
        D = _dual_columns(basis, F.q, d)
        s = _sample_secret(F, x, params.n, rng)
        g = ExtVector(F, basis[d:])
        return RankIdealKey(params, F, R, x, g, basis, D, s, d)
    raise RetriesExhausted("rank check on (a, g1, g2) kept failing")


def keygen_additive(params: RankIdealParams, rng: RngStream) -> RankIdealKey:
    F, R = params.field_ctx(), params.ring()
    x = _random_full_rank(F, params.w, rng)
    basis = _extend_to_basis(F, x.coords, rng)
    D = _dual_columns(basis, F.q, params.w)
    s = _sample_secret(F, x, params.n, rng)
    g = ExtVector(F, basis[params.w :])
    return RankIdealKey(params, F, R, x, g, basis, D, s, params.w)


def _msg(msg, key: RankIdealKey) -> np.ndarray:
    v = np.asarray(msg, dtype=np.int64).reshape(-1)
    if v.shape != (key.params.n,) or np.any((v < 0) | (v >= key.params.q)):
        raise ParameterError(f"message must be {key.params.n} elements of F_{key.params.q}")
    return v


def encrypt(msg, key: RankIdealKey, rng: RngStream, track: bool = True) -> RankIdealCiphertext:
    F, n, w = key.fctx, key.params.n, key.params.w
    m = _msg(msg, key)
    r1 = ExtVector(F, F.random(rng, n))
    R2 = rng.integers(F.q, (w, n))
    e = ExtVector(F, algebra._kernels.matmul(R2.T, key.x.coords, F.q))
    m_tilde = ExtVector(F, F.scale(m, key.g.coords[0]))
    v = algebra.vector_product(key.s, r1, key.ring) + e + m_tilde
    if track:
        key.published += 1
        if key.published >= 2 * w:
            warnings.warn(
                f"{key.published} ciphertexts published under one key; "
                f"{2 * w} or more independent ciphertexts allow polynomial-time key recovery",
                ExposureWarning,
                stacklevel=2,
            )
    return RankIdealCiphertext((r1, v))


def _extract(z: ExtVector, column: np.ndarray, q: int) -> np.ndarray:
    return algebra._kernels.matmul(column[None, :], algebra.MAT(z), q)[0]


def decrypt(ct: RankIdealCiphertext, key: RankIdealKey) -> np.ndarray:
    if ct.arity == 3:
        return decrypt_product(ct, key)
    u, v = ct.parts
    z = v - algebra.vector_product(key.s, u, key.ring)
    return _extract(z, key.g1_extractor, key.fctx.q)


def decrypt_product(ct: RankIdealCiphertext, key: RankIdealKey) -> np.ndarray:
    if ct.arity != 3:
        raise UnsupportedOp("decrypt_product needs a product triple")
    a, b, c = ct.parts
    ring = key.ring
    s = key.s
    t = a + algebra.vector_product(s, b, ring) + algebra.vector_product(algebra.vector_product(s, s, ring), c, ring)
    return _extract(t, key.g2_extractor, key.fctx.q)


def eval_add(c1: RankIdealCiphertext, c2: RankIdealCiphertext) -> RankIdealCiphertext:
    if c1.arity != c2.arity:
        raise UnsupportedOp("cannot add a pair to a product triple")
    return RankIdealCiphertext(tuple(a + b for a, b in zip(c1.parts, c2.parts)))


def eval_ptmult(ct: RankIdealCiphertext, plain, ring: RingCtx) -> RankIdealCiphertext:
    plain = np.asarray(plain, dtype=np.int64) % ring.coeff_modulus
    return RankIdealCiphertext(tuple(algebra.vector_product(p, plain, ring) for p in ct.parts))


def eval_mult(c1: RankIdealCiphertext, c2: RankIdealCiphertext, ring: RingCtx) -> RankIdealCiphertext:
    if c1.arity != 2 or c2.arity != 2:
        raise UnsupportedOp("only fresh pairs can be multiplied (once)")
    (u, v), (u2, v2) = c1.parts, c2.parts
    vp = algebra.vector_product
    a = vp(v, v2, ring)
    b = -(vp(u, v2, ring) + vp(u2, v, ring))
    c = vp(u, u2, ring)
    return RankIdealCiphertext((a, b, c))


def syndrome_instance(cts: list[RankIdealCiphertext], key_or_params) -> tuple[codes.IdealCode, np.ndarray]:
    """Public ideal-rank syndrome data from pair ciphertexts.

    Returns the ``(l+1)``-ideal code generated by ``u_1..u_l`` and the
    syndrome ``(v_1, ..., v_l)``; for encryptions of zero the vector
    ``(-s, e_1, ..., e_l)`` has rank weight at most ``w`` and maps to it
    through the parity-check matrix.
    """
    ring = key_or_params.ring if isinstance(key_or_params, RankIdealKey) else key_or_params.ring()
    if any(c.arity != 2 for c in cts):
        raise UnsupportedOp("syndrome instances use pair ciphertexts")
    code = codes.build_ideal_code([c.parts[0] for c in cts], ring)
    y = np.concatenate([c.parts[1].coords for c in cts], axis=0)
    return code, y


def syndrome_witness(cts: list[RankIdealCiphertext], key: RankIdealKey) -> ExtVector:
    """``(-s, v_1 - s.u_1, ..., v_l - s.u_l)`` computed with the secret key."""
    pieces = [(-key.s).coords]
    for c in cts:
        u, v = c.parts
        pieces.append((v - algebra.vector_product(key.s, u, key.ring)).coords)
    return ExtVector(key.fctx, np.concatenate(pieces, axis=0))


# ---------------------------------------------------------------------------
# adapters
# ---------------------------------------------------------------------------


class _RankIdealAdapter(SchemeAdapter):
    additive = False

    def params_from_dict(self, d):
        fp = d.get("field_poly")
        rp = d.get("ring_poly")
        return RankIdealParams(
            d["q"], d["m"], d["n"], d["w"], self.additive,
            tuple(fp) if fp is not None else None,
            tuple(rp) if rp is not None else None,
        )

    def params_to_dict(self, params):
        return params.to_dict()

    def keygen(self, params, rng):
        if params.additive != self.additive:
            raise ParameterError("params belong to the other rank-ideal variant")
        return keygen(params, rng)

    def key_sections(self, key):
        F = key.fctx
        return {
            "x": F.pack(key.x.coords),
            "g": F.pack(key.g.coords),
            "D": algebra.pack_coeffs(key.D, F.q),
            "s": F.pack(key.s.coords),
        }

    def _env(self, ct: RankIdealCiphertext, F: FieldCtx):
        payload = b"".join(F.pack(p.coords) for p in ct.parts)
        return CiphertextEnvelope(self.scheme_id, payload, arity=ct.arity)

    def _ct(self, env, key) -> RankIdealCiphertext:
        self.check_envelope(env)
        F, n = key.fctx, key.params.n
        width = algebra.coeff_width(F.q) * n * F.m
        if len(env.payload) != width * env.arity:
            from ..errors import Corrupt

            raise Corrupt("rank-ideal payload size does not match arity")
        parts = tuple(
            ExtVector(F, F.unpack(env.payload[i * width : (i + 1) * width], n)) for i in range(env.arity)
        )
        return RankIdealCiphertext(parts)

    def encrypt(self, key, message, rng):
        return self._env(encrypt(message, key, rng), key.fctx)

    def decrypt(self, key, env):
        return [int(v) for v in decrypt(self._ct(env, key), key)]

    def evaluate(self, op, envs, key, extra=None):
        cts = [self._ct(e, key) for e in envs]
        if op == "add":
            out = eval_add(cts[0], cts[1])
        elif op == "ptmult":
            plain = (extra or {}).get("plaintext")
            if plain is None:
                raise ParameterError("ptmult needs a plaintext vector")
            out = eval_ptmult(cts[0], plain, key.ring)
        else:
            out = eval_mult(cts[0], cts[1], key.ring)
        return self._env(out, key.fctx)

    def random_message(self, params, rng):
        return [int(v) for v in rng.integers(params.q, params.n)]


class RankIdealAdapter(_RankIdealAdapter):
    scheme_id = SchemeId.RANK_IDEAL
    ops = frozenset({"add", "mult", "ptmult"})


class RankIdealAdditiveAdapter(_RankIdealAdapter):
    scheme_id = SchemeId.RANK_IDEAL_ADDITIVE
    ops = frozenset({"add", "ptmult"})
    additive = True


ADAPTER = register(RankIdealAdapter())
ADDITIVE_ADAPTER = register(RankIdealAdditiveAdapter())
