"""Symmetric bit encryption from evaluations of a multivariate polynomial ideal.

A ciphertext is ``m p 1 + G f + (0, ebar)`` where ``G f`` evaluates a
random ``f`` in the degree-bounded ideal ``I_{<=r}`` at secret points.  The
secret ``s`` is orthogonal to every such evaluation, so ``<s, c>`` leaves
``m p sigma_s`` plus small noise.

The last ``n - alpha`` points are placed on the zero set of ``I``.  Ideal
evaluations then vanish there, the orthogonal complement is exactly the
vectors ``(0, s_2)``, and the Hadamard product of two ciphertexts keeps a
clean ``p^2 m_1 m_2`` term on the coordinates that ``s`` reads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime

from .. import algebra, codes
from ..core import CiphertextEnvelope, NoiseReport, SchemeAdapter, SchemeId, register
from ..errors import Inconsistent, ParameterError, RetriesExhausted
from ..rng import RngStream, sample_discrete_gaussian

KEYGEN_RETRIES = 200
MULT_MODES = ("round", "modinv")


@dataclass(frozen=True)
class MVIdealParams:
    q: int
    l: int  # noqa: E741  (variable count)
    r: int
    n: int
    p: int
    sigma: float
    generators: int = 1
    s_bound: int = 4

    def __post_init__(self):
        if not isprime(self.q):
            raise ParameterError("q must be prime")
        if self.p < 1 or math.gcd(self.p, self.q) != 1:
            raise ParameterError("p must be positive and invertible mod q")
        if not 1 <= self.generators < self.l:
            raise ParameterError("need 1 <= generators < l so the ideal has a zero set to sample")
        if self.n >= self.q:
            raise ParameterError("need n < q")
        if self.n > self.N:
            raise ParameterError(f"need n <= N = {self.N}")
        if self.sigma < 0 or self.s_bound < 1:
            raise ParameterError("need sigma >= 0 and s_bound >= 1")

    @property
    def N(self) -> int:
        return math.comb(self.l + self.r, self.l)

    def to_dict(self) -> dict:
        return {
            "q": self.q, "l": self.l, "r": self.r, "n": self.n, "p": self.p,
            "sigma": self.sigma, "generators": self.generators, "s_bound": self.s_bound,
        }


@dataclass(eq=False)
class MVIdealKey:
    params: MVIdealParams
    exponents: list = field(repr=False)
    generators: np.ndarray = field(repr=False)
    ideal_basis: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    G: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)

    @property
    def alpha(self) -> int:
        return self.ideal_basis.shape[0]

    @property
    def sigma_s(self) -> int:
        return int(sum(int(v) for v in self.s))

    @property
    def scale(self) -> int:
        return self.sigma_s * self.params.p


# ---------------------------------------------------------------------------
# polynomials as coefficient vectors in the graded monomial basis
# ---------------------------------------------------------------------------


def _poly_mul_monomial(coeffs, exponents, index, mono, q) -> np.ndarray:
    out = np.zeros(len(exponents), dtype=np.int64)
    for j, c in enumerate(coeffs):
        if c:
            e = tuple(a + b for a, b in zip(exponents[j], mono))
            k = index.get(e)
            if k is None:
                raise ValueError("product exceeds the degree bound")
            out[k] = (out[k] + c) % q
    return out


def ideal_degree_basis(generators: np.ndarray, exponents, r: int, q: int) -> np.ndarray:
    """Row basis of ``I_{<=r}`` from monomial multiples of the generators."""
    index = {e: i for i, e in enumerate(exponents)}
    rows = []
    for g in generators:
        deg = max(sum(exponents[j]) for j in np.nonzero(g)[0])
        for mono in exponents:
            if sum(mono) + deg <= r:
                rows.append(_poly_mul_monomial(g, exponents, index, mono, q))
    return algebra.row_basis(np.array(rows, dtype=np.int64), q)


def _random_affine_forms(count: int, l: int, exponents, q: int, rng: RngStream) -> np.ndarray:  # noqa: E741
    gens = np.zeros((count, len(exponents)), dtype=np.int64)
    linear = [exponents.index(tuple(int(i == v) for i in range(l))) for v in range(l)]
    for g in gens:
        while True:
            lin = rng.integers(q, l)
            if lin.any():
                break
        g[0] = rng.randbelow(q)
        g[linear] = lin
    A = gens[:, linear]
    if algebra.rank(A, q) != count:
        raise Inconsistent("generators not independent")
    return gens


def _zero_set_point(generators, exponents, l, q, rng) -> np.ndarray:  # noqa: E741
    linear = [exponents.index(tuple(int(i == v) for i in range(l))) for v in range(l)]
    A = generators[:, linear]
    b = (-generators[:, 0]) % q
    space = algebra.solve_linear(A, b, q, mode="all")
    mix = rng.integers(q, space.kernel.shape[0])
    return (space.particular + algebra._kernels.matmul(mix[None, :], space.kernel, q)[0]) % q


def keygen(params: MVIdealParams, rng: RngStream) -> MVIdealKey:
    q, l, r, n = params.q, params.l, params.r, params.n  # noqa: E741
    exponents = codes.exponent_tuples(l, r)
    for _ in range(KEYGEN_RETRIES):
        try:
            gens = _random_affine_forms(params.generators, l, exponents, q, rng)
        except Inconsistent:
            continue
        basis = ideal_degree_basis(gens, exponents, r, q)
        alpha = basis.shape[0]
        if not alpha < n:
            raise ParameterError(f"need alpha < n (alpha={alpha}, n={n})")
        outside = rng.integers(q, (alpha, l))
        on_zero_set = np.array([_zero_set_point(gens, exponents, l, q, rng) for _ in range(n - alpha)])
        pts = np.vstack([outside, on_zero_set.reshape(-1, l)])
        if len({tuple(p) for p in pts.tolist()}) != n:
            continue
        G = codes.monomial_values(pts, exponents, q).T  # (n, N)
        if algebra.rank(G, q) != n:
            continue
        head = algebra._kernels.matmul(G[:alpha], basis.T, q)
        if algebra.rank(head, q) != alpha:
            continue
        V = algebra._kernels.matmul(G, basis.T, q)  # columns span V_{I<=r}
        s = _sample_secret(params, V, alpha, rng)
        if s is None:
            continue
        return MVIdealKey(params, exponents, gens, basis, pts, G, s)
    raise RetriesExhausted("could not find points meeting both surjectivity conditions")


def _sample_secret(params: MVIdealParams, V: np.ndarray, alpha: int, rng: RngStream):
    q, n = params.q, params.n
    perp = algebra.nullspace(V.T, q)
    if perp.shape[0] != n - alpha or np.any(perp[:, :alpha]):
        raise AssertionError("orthogonal complement is not supported on the zero-set coordinates")
    for _ in range(KEYGEN_RETRIES):
        s2 = rng.integers(params.s_bound, n - alpha) + 1
        total = int(s2.sum())
        if 0 < total and total * params.p < q // 2:
            s = np.concatenate([np.zeros(alpha, dtype=np.int64), s2])
            if algebra._kernels.matmul(s[None, :], V, q).any():
                raise AssertionError("secret is not orthogonal to the ideal evaluations")
            return s
    return None


def random_ideal_element(key: MVIdealKey, rng: RngStream) -> np.ndarray:
    """Coefficient vector of a uniform element of ``I_{<=r}``."""
    q = key.params.q
    mix = rng.integers(q, key.alpha)
    return algebra._kernels.matmul(mix[None, :], key.ideal_basis, q)[0]


def encrypt(m: int, key: MVIdealKey, rng: RngStream, noise=None) -> np.ndarray:
    p = key.params
    if m not in (0, 1):
        raise ParameterError("message must be a bit")
    f = random_ideal_element(key, rng)
    Gf = algebra._kernels.matmul(key.G, f[:, None], p.q)[:, 0]
    ebar = sample_discrete_gaussian(rng, p.sigma, p.n - key.alpha) if noise is None else np.asarray(noise)
    e = np.concatenate([np.zeros(key.alpha, dtype=np.int64), ebar])
    return (m * p.p + Gf + e) % p.q


def inner(key: MVIdealKey, c) -> int:
    """Centered representative of ``<s, c> mod q``."""
    q = key.params.q
    return algebra.centered(sum(int(a) * int(b) for a, b in zip(key.s, c)), q)


def decrypt(c, key: MVIdealKey) -> int:
    """Nearest multiple of ``sigma_s p`` below the centered inner product, mod 2."""
    x = inner(key, c)
    scale = key.scale
    return ((2 * x + scale) // (2 * scale)) % 2


def residual_noise(c, key: MVIdealKey, m: int) -> int:
    """``<s, c> - m p sigma_s`` as a centered value mod q."""
    return algebra.centered(inner(key, c) - m * key.scale, key.params.q)


def eval_add(c1, c2, q: int) -> np.ndarray:
    return (np.asarray(c1) + np.asarray(c2)) % q


def eval_mult(c1, c2, key_or_params, mode: str = "round") -> np.ndarray:
    """Hadamard product divided by ``p``.

    ``mode="round"`` multiplies centered representatives over the integers
    and rounds the quotient; ``mode="modinv"`` multiplies by ``p^-1 mod q``.
    """
    params = key_or_params.params if isinstance(key_or_params, MVIdealKey) else key_or_params
    q, p = params.q, params.p
    if mode == "modinv":
        inv = pow(p, -1, q)
        return np.array([int(a) * int(b) % q * inv % q for a, b in zip(c1, c2)], dtype=np.int64)
    if mode != "round":
        raise ParameterError(f"mult mode must be one of {MULT_MODES}")
    out = []
    for a, b in zip(c1, c2):
        prod = algebra.centered(int(a), q) * algebra.centered(int(b), q)
        out.append(((2 * prod + p) // (2 * p)) % q)
    return np.array(out, dtype=np.int64)


def mult_noise_prediction(key: MVIdealKey, m1: int, m2: int, e1, e2) -> int:
    """``<s_2, m_1 e_2 + m_2 e_1 + p^-1 (e_1 . e_2)> mod q`` (centered)."""
    q, p = key.params.q, key.params.p
    inv = pow(p, -1, q)
    s2 = key.s[key.alpha :]
    total = sum(int(s) * (m1 * int(b) + m2 * int(a) + inv * int(a) * int(b)) for s, a, b in zip(s2, e1, e2))
    return algebra.centered(total, q)


def noise_report(c, key: MVIdealKey) -> NoiseReport:
    m = decrypt(c, key)
    x = inner(key, c)
    k = (2 * x + key.scale) // (2 * key.scale)
    observed = abs(x - k * key.scale)
    return NoiseReport(SchemeId.MVIDEAL, observed, key.scale // 2, {"decoded": m, "multiple": k})


class MVIdealAdapter(SchemeAdapter):
    scheme_id = SchemeId.MVIDEAL
    ops = frozenset({"add", "mult"})

    def params_from_dict(self, d):
        return MVIdealParams(
            d["q"], d["l"], d["r"], d["n"], d["p"], float(d["sigma"]),
            d.get("generators", 1), d.get("s_bound", 4),
        )

    def params_to_dict(self, params):
        return params.to_dict()

    def keygen(self, params, rng):
        return keygen(params, rng)

    def key_sections(self, key):
        q = key.params.q
        return {
            "generators": algebra.pack_coeffs(key.generators, q),
            "points": algebra.pack_coeffs(key.points, q),
            "secret": algebra.pack_coeffs(key.s, q),
        }

    def _env(self, c, q):
        return CiphertextEnvelope(self.scheme_id, algebra.pack_coeffs(c, q), arity=1)

    def _ct(self, env, key):
        self.check_envelope(env)
        return np.array(algebra.unpack_coeffs(env.payload, key.params.q, key.params.n), dtype=np.int64)

    def encrypt(self, key, message, rng):
        return self._env(encrypt(int(message), key, rng), key.params.q)

    def decrypt(self, key, env):
        return decrypt(self._ct(env, key), key)

    def evaluate(self, op, envs, key, extra=None):
        a, b = (self._ct(e, key) for e in envs[:2])
        if op == "add":
            return self._env(eval_add(a, b, key.params.q), key.params.q)
        mode = (extra or {}).get("mult_mode", "round")
        return self._env(eval_mult(a, b, key, mode), key.params.q)

    def noise_report(self, key, env):
        return noise_report(self._ct(env, key), key)

    def random_message(self, params, rng):
        return rng.randbelow(2)

    def message_from_json(self, params, value):
        return int(value)


ADAPTER = register(MVIdealAdapter())
