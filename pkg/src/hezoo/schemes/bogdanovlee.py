"""Asymmetric somewhat-homomorphic scheme over F_q with a hidden Vandermonde row set.

Rows of the secret matrix indexed by ``S`` use only the first ``s/3``
powers of their evaluation point.  A vector ``y`` supported on ``S`` that
annihilates those powers and sums to one turns any ciphertext
``P x + m 1 + e`` into ``m`` whenever ``e`` vanishes on ``S``.

This construction is broken; it is here for study and testing only.
"""

from __future__ import annotations

import hashlib
import math
import sys
from dataclasses import dataclass, field

import numpy as np
from sympy import isprime, nextprime

from .. import algebra
from ..core import CiphertextEnvelope, SchemeAdapter, SchemeId, register
from ..errors import Inconsistent, NoAnnihilator, ParameterError, RetriesExhausted
from ..rng import RngStream

INSECURITY_NOTICE = (
    "bogdanov-lee: this scheme is not secure. A published attack recovers the secret "
    "row set and decrypts any ciphertext. Use it for study only."
)


def round_to_multiple_of_3(x: float) -> int:
    return max(3, 3 * round(x / 3))


@dataclass(frozen=True)
class BLParams:
    n: int
    s: int
    r: int
    q: int
    eta: float
    alpha: float | None = None

    def __post_init__(self):
        if self.s % 3:
            raise ParameterError("s must be divisible by 3")
        if not self.s // 3 < self.r:
            raise ParameterError("need s/3 < r")
        if not 3 <= self.s <= self.n:
            raise ParameterError("need 3 <= s <= n")
        if not isprime(self.q):
            raise ParameterError("q must be prime")
        if self.q <= self.n:
            raise ParameterError("need q > n for distinct evaluation points")
        if not 0 <= self.eta <= 1:
            raise ParameterError("eta must be a probability")

    def to_dict(self) -> dict:
        d = {"n": self.n, "s": self.s, "r": self.r, "q": self.q, "eta": self.eta}
        if self.alpha is not None:
            d["alpha"] = self.alpha
        return d


def recipe(n: int, alpha: float) -> BLParams:
    """Parameters from the recipe ``s = n^(a/4), r = n^(1-a/8), eta = n^-(1-a/4), q >= 2^(n^a)``.

    ``q`` is also pushed above ``n`` so that ``n`` distinct evaluation points exist.
    """
    if not 0 < alpha <= 0.25:
        raise ParameterError("alpha must lie in (0, 1/4]")
    s = round_to_multiple_of_3(n ** (alpha / 4))
    r = math.ceil(n ** (1 - alpha / 8))
    eta = 1 / n ** (1 - alpha / 4)
    q = nextprime(max((1 << math.ceil(n**alpha)) - 1, n))
    return BLParams(n, s, r, q, eta, alpha)


@dataclass(eq=False)
class BLKey:
    params: BLParams
    S: tuple[int, ...]
    a: np.ndarray = field(repr=False)
    M: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)
    P: np.ndarray = field(repr=False)
    _annihilators: dict = field(default_factory=dict, repr=False)


def unit_determinant_matrix(r: int, q: int, rng: RngStream, rounds: int | None = None) -> np.ndarray:
    """Product of random transvections ``row_i += c row_j``; each has determinant one."""
    R = np.eye(r, dtype=np.int64)
    for _ in range(rounds if rounds is not None else 2 * r * r):
        i = rng.randbelow(r)
        j = rng.randbelow(r - 1)
        j += j >= i
        c = rng.randbelow(q)
        R[i] = (R[i] + c * R[j]) % q
    return R


def keygen(params: BLParams, rng: RngStream) -> BLKey:
    sys.stderr.write(INSECURITY_NOTICE + "\n")
    n, s, r, q = params.n, params.s, params.r, params.q
    S = tuple(sorted(rng.sample(n, s)))
    a = np.array(_distinct(rng, q, n), dtype=object)
    M = np.zeros((n, r), dtype=object)
    for i in range(n):
        width = s // 3 if i in S else r
        v = 1
        for j in range(width):
            v = v * int(a[i]) % q
            M[i, j] = v
    R = unit_determinant_matrix(r, q, rng) if q < 1 << 31 else np.array(
        _unit_det_obj(r, q, rng), dtype=object
    )
    P = algebra._kernels.matmul(M, R, q)
    small = q < algebra._kernels.SMALL_MODULUS_LIMIT
    cast = (lambda A: np.asarray(A, dtype=np.int64)) if small else (lambda A: np.asarray(A, dtype=object))
    return BLKey(params, S, cast(a), cast(M), cast(R), cast(P))


def _distinct(rng: RngStream, q: int, n: int) -> list[int]:
    out: list[int] = []
    seen: set[int] = set()
    while len(out) < n:
        v = rng.randbelow(q)
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def _unit_det_obj(r: int, q: int, rng: RngStream) -> list[list[int]]:
    R = [[int(i == j) for j in range(r)] for i in range(r)]
    for _ in range(2 * r * r):
        i = rng.randbelow(r)
        j = rng.randbelow(r - 1)
        j += j >= i
        c = rng.randbelow(q)
        R[i] = [(x + c * y) % q for x, y in zip(R[i], R[j])]
    return R


def annihilator_system(key: BLKey, degree_cap: int = 1):
    """Matrix and right-hand side of ``sum y_i a_i^j = 0 (j = 1..J), sum y_i = 1`` over ``i in S``.

    ``J = min(degree_cap * s/3, s - 2)``; ``degree_cap = 1`` gives exactly ``s/3`` power equations.
    """
    if degree_cap < 1:
        raise ParameterError("degree_cap must be >= 1")
    p = key.params
    q = p.q
    top = min(degree_cap * (p.s // 3), p.s - 2) if degree_cap > 1 else p.s // 3
    rows = []
    for j in range(1, top + 1):
        rows.append([pow(int(key.a[i]), j, q) for i in key.S])
    rows.append([1] * p.s)
    A = np.array(rows, dtype=np.int64 if q < algebra._kernels.SMALL_MODULUS_LIMIT else object)
    b = np.zeros(len(rows), dtype=A.dtype)
    b[-1] = 1
    return A, b


def annihilator(key: BLKey, degree_cap: int = 1, max_tries: int = 256) -> np.ndarray:
    """A solution ``y`` (indexed like ``S``) with every entry nonzero, chosen deterministically per key."""
    cached = key._annihilators.get(degree_cap)
    if cached is not None:
        return cached
    q = key.params.q
    A, b = annihilator_system(key, degree_cap)
    try:
        sol = algebra.solve_linear(A, b, q, mode="all")
    except Inconsistent:
        raise NoAnnihilator("annihilator system is unsolvable") from None
    digest = hashlib.sha256(
        repr((key.S, [int(v) for v in key.a], degree_cap)).encode()
    ).digest()
    rng = RngStream(digest)
    K = np.asarray(sol.kernel, dtype=object)
    base = np.asarray(sol.particular, dtype=object)
    for _ in range(max_tries):
        coeffs = [rng.randbelow(q) for _ in range(K.shape[0])]
        y = base.copy()
        for c, row in zip(coeffs, K):
            y = (y + c * row) % q
        if all(int(v) != 0 for v in y):
            y = np.array([int(v) for v in y], dtype=object)
            key._annihilators[degree_cap] = y
            return y
    raise RetriesExhausted("no full-support annihilator found")


def sample_noise(params: BLParams, rng: RngStream) -> np.ndarray:
    hit = rng.bernoulli(params.eta, params.n)
    e = np.zeros(params.n, dtype=object)
    for i in np.nonzero(hit)[0]:
        e[i] = 1 + rng.randbelow(params.q - 1)
    return e


def encrypt(m: int, key: BLKey, rng: RngStream, x=None, e=None) -> np.ndarray:
    """``c = P x + m 1 + e``; ``x`` and ``e`` may be fixed for testing."""
    p = key.params
    q = p.q
    if x is None:
        x = [rng.randbelow(q) for _ in range(p.r)]
    if e is None:
        e = sample_noise(p, rng)
    Px = [sum(int(P_ij) * int(x_j) for P_ij, x_j in zip(row, x)) for row in key.P]
    c = [(v + int(m) + int(ei)) % q for v, ei in zip(Px, e)]
    return np.array(c, dtype=object)


def decrypt(c, key: BLKey, degree_cap: int = 1) -> int:
    y = annihilator(key, degree_cap)
    q = key.params.q
    return sum(int(yi) * int(c[i]) for yi, i in zip(y, key.S)) % q


def eval_add(c1, c2, q: int) -> np.ndarray:
    if len(c1) != len(c2):
        raise ParameterError("length mismatch")
    return np.array([(int(a) + int(b)) % q for a, b in zip(c1, c2)], dtype=object)


def eval_mult(c1, c2, q: int) -> np.ndarray:
    if len(c1) != len(c2):
        raise ParameterError("length mismatch")
    return np.array([int(a) * int(b) % q for a, b in zip(c1, c2)], dtype=object)


class BogdanovLeeAdapter(SchemeAdapter):
    scheme_id = SchemeId.BOGDANOV_LEE
    ops = frozenset({"add", "mult"})

    def params_from_dict(self, d):
        return BLParams(d["n"], d["s"], d["r"], d["q"], float(d["eta"]), d.get("alpha"))

    def params_to_dict(self, params):
        return params.to_dict()

    def keygen(self, params, rng):
        return keygen(params, rng)

    def key_sections(self, key):
        q = key.params.q
        return {
            "public_matrix": algebra.pack_coeffs(key.P, q),
            "secret_rows": np.asarray(key.S, dtype="<u4").tobytes(),
        }

    def _env(self, c, q, gamma=0):
        return CiphertextEnvelope(self.scheme_id, algebra.pack_coeffs(c, q), gamma=gamma, arity=1)

    def _ct(self, env, key):
        self.check_envelope(env)
        return np.array(algebra.unpack_coeffs(env.payload, key.params.q, key.params.n), dtype=object)

    def encrypt(self, key, message, rng):
        return self._env(encrypt(message, key, rng), key.params.q)

    def decrypt(self, key, env):
        return decrypt(self._ct(env, key), key, degree_cap=1 + env.gamma)

    def evaluate(self, op, envs, key, extra=None):
        q = key.params.q
        a, b = (self._ct(e, key) for e in envs[:2])
        if op == "add":
            return self._env(eval_add(a, b, q), q, max(envs[0].gamma, envs[1].gamma))
        return self._env(eval_mult(a, b, q), q, envs[0].gamma + envs[1].gamma + 1)

    def random_message(self, params, rng):
        return rng.randbelow(params.q)

    def message_from_json(self, params, value):
        return int(value)


ADAPTER = register(BogdanovLeeAdapter())
