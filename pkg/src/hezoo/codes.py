"""Linear codes, Reed-Muller families, Reed decoding, and ideal codes.

Binary Reed-Muller conventions: the j-th evaluation point (0-based) is the
binary expansion of ``j`` with ``x_1`` as the least significant bit, and the
generator rows are monomials in graded lexicographic order (constant, then
``x_1..x_m``, then degree-2 products, and so on).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb

import numpy as np

from . import algebra
from .algebra import ExtVector, FieldCtx, RingCtx
from .errors import AmbiguousAtY, DecodeAmbiguous, ParameterError


@dataclass(frozen=True, eq=False)
class LinearCode:
    """``[n, k, d]`` code over the prime field F_q given by a full-rank generator matrix."""

    G: np.ndarray = field(repr=False)
    q: int = 2
    d: int | None = None

    def __post_init__(self):
        G = np.asarray(self.G, dtype=np.int64) % self.q
        if G.ndim != 2:
            raise ParameterError("generator must be a matrix")
        if algebra.rank(G, self.q) != G.shape[0]:
            raise ParameterError("generator matrix must have full row rank")
        G.setflags(write=False)
        object.__setattr__(self, "G", G)

    @property
    def n(self) -> int:
        return self.G.shape[1]

    @property
    def k(self) -> int:
        return self.G.shape[0]

    @cached_property
    def H(self) -> np.ndarray:
        """Parity-check matrix, rows spanning the dual code."""
        H = algebra.nullspace(self.G, self.q)
        H.setflags(write=False)
        return H

    def encode(self, msg) -> np.ndarray:
        msg = np.asarray(msg, dtype=np.int64).reshape(1, -1)
        if msg.shape[1] != self.k:
            raise ParameterError(f"message length must be {self.k}")
        return algebra._kernels.matmul(msg, self.G, self.q)[0]

    def syndrome(self, word) -> np.ndarray:
        word = np.asarray(word, dtype=np.int64).reshape(-1, 1)
        if self.H.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        return algebra._kernels.matmul(self.H, word, self.q)[:, 0]

    def contains(self, word) -> bool:
        return not self.syndrome(word).any()

    def unencode(self, word) -> np.ndarray:
        """Message ``p`` with ``p G = word``; raises ``Inconsistent`` off the code."""
        return algebra.solve_linear(self.G.T, word, self.q)


# ---------------------------------------------------------------------------
# binary Reed-Muller
# ---------------------------------------------------------------------------


def graded_monomials(m: int, r: int) -> list[tuple[int, ...]]:
    """Squarefree monomials in ``m`` variables up to degree ``r`` as index tuples."""
    out: list[tuple[int, ...]] = []
    for deg in range(r + 1):
        out.extend(itertools.combinations(range(m), deg))
    return out


@dataclass(frozen=True, eq=False)
class BinaryRM:
    r: int
    m: int
    code: LinearCode = field(repr=False)
    monomials: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def n(self) -> int:
        return 1 << self.m

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def d(self) -> int:
        return 1 << (self.m - self.r)

    @property
    def G(self) -> np.ndarray:
        return self.code.G

    def point(self, j: int) -> tuple[int, ...]:
        """Evaluation point ``a_{j+1}`` as ``(x_1, ..., x_m)``."""
        return tuple((j >> i) & 1 for i in range(self.m))

    def encode(self, msg) -> np.ndarray:
        return self.code.encode(msg)

    def descriptor(self) -> dict:
        return {"family": "binary-rm", "params": {"r": self.r, "m": self.m}}


def build_binary_rm(r: int, m: int) -> BinaryRM:
    if m < 0 or not 0 <= r <= m:
        raise ParameterError("need 0 <= r <= m")
    n = 1 << m
    pts = ((np.arange(n)[None, :] >> np.arange(m)[:, None]) & 1).astype(np.int64)  # (m, n)
    monos = graded_monomials(m, r)
    G = np.ones((len(monos), n), dtype=np.int64)
    for row, mono in enumerate(monos):
        for v in mono:
            G[row] *= pts[v]
    assert G.shape[0] == sum(comb(m, i) for i in range(r + 1))
    return BinaryRM(r, m, LinearCode(G, 2, 1 << (m - r)), tuple(monos))


def reed_decode(w, rm: BinaryRM) -> np.ndarray:
    """Majority-logic decoding, highest-degree monomials first.

    Returns the message whose codeword is within distance ``< d/2`` of ``w``.
    Raises :class:`DecodeAmbiguous` on a tied vote or when the result is not
    within the unique-decoding radius.
    """
    w = np.asarray(w, dtype=np.int64) % 2
    m, n = rm.m, rm.n
    if w.shape != (n,):
        raise ParameterError(f"word length must be {n}")
    msg = np.zeros(rm.k, dtype=np.int64)
    residual = w.copy()
    by_degree: dict[int, list[int]] = {}
    for idx, mono in enumerate(rm.monomials):
        by_degree.setdefault(len(mono), []).append(idx)
    for deg in range(rm.r, -1, -1):
        cube = residual.reshape((2,) * m) if m else residual
        for idx in by_degree.get(deg, []):
            mono = rm.monomials[idx]
            axes = tuple(m - 1 - v for v in mono)
            votes = (cube.sum(axis=axes) % 2).reshape(-1) if axes else cube.reshape(-1)
            ones = int(votes.sum())
            zeros = votes.size - ones
            if ones == zeros:
                raise DecodeAmbiguous(f"tied majority vote for monomial {mono}")
            msg[idx] = 1 if ones > zeros else 0
        layer = [i for i in by_degree.get(deg, []) if msg[i]]
        if layer:
            residual = (residual + rm.G[layer].sum(axis=0)) % 2
    if 2 * int(residual.sum()) >= rm.d:
        raise DecodeAmbiguous("word is outside the unique decoding radius")
    return msg


# ---------------------------------------------------------------------------
# q-ary (punctured) Reed-Muller evaluation codes
# ---------------------------------------------------------------------------


def exponent_tuples(t: int, max_degree: int) -> list[tuple[int, ...]]:
    """Exponent vectors of total degree ``<= max_degree``, graded then lexicographic (descending)."""
    out: list[tuple[int, ...]] = []
    for deg in range(max_degree + 1):
        level = [e for e in itertools.product(range(deg + 1), repeat=t) if sum(e) == deg]
        level.sort(reverse=True)
        out.extend(level)
    return out


def monomial_values(points, exponents, q: int) -> np.ndarray:
    """Matrix ``V[j, i] = prod_v points[i, v]^exponents[j][v] mod q``."""
    pts = np.asarray(points, dtype=np.int64) % q
    if pts.ndim == 1:
        pts = pts[None, :]
    t = pts.shape[1]
    maxdeg = max((max(e) for e in exponents if e), default=0)
    powers = np.ones((maxdeg + 1, pts.shape[0], t), dtype=np.int64)
    for k in range(1, maxdeg + 1):
        powers[k] = (powers[k - 1] * pts) % q
    V = np.ones((len(exponents), pts.shape[0]), dtype=np.int64)
    for j, e in enumerate(exponents):
        for v in range(t):
            if e[v]:
                V[j] = (V[j] * powers[e[v], :, v]) % q
    return V


@dataclass(frozen=True, eq=False)
class QaryRM:
    """Evaluations at ``support`` of polynomials in ``t`` variables of degree ``<= rho``.

    With ``strict=True`` the degree bound is ``< rho`` instead.
    """

    q: int
    t: int
    rho: int
    support: np.ndarray = field(repr=False)
    strict: bool = False

    def __post_init__(self):
        if self.rho >= self.q:
            raise ParameterError("order must be below q")
        pts = np.asarray(self.support, dtype=np.int64)
        if pts.ndim != 2 or pts.shape[1] != self.t:
            raise ParameterError("support must be an (n, t) array")
        if np.any((pts < 0) | (pts >= self.q)):
            raise ParameterError("support coordinates must lie in [0, q)")
        if len({tuple(p) for p in pts.tolist()}) != len(pts):
            raise ParameterError("support points must be distinct")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "support", pts)

    @property
    def n(self) -> int:
        return self.support.shape[0]

    @property
    def max_degree(self) -> int:
        return self.rho - 1 if self.strict else self.rho

    @cached_property
    def exponents(self) -> list[tuple[int, ...]]:
        return exponent_tuples(self.t, self.max_degree) if self.max_degree >= 0 else []

    @property
    def function_dim(self) -> int:
        return len(self.exponents)

    @cached_property
    def eval_matrix(self) -> np.ndarray:
        """Monomial-basis evaluations at the support, shape (function_dim, n)."""
        M = monomial_values(self.support, self.exponents, self.q)
        M.setflags(write=False)
        return M

    @cached_property
    def code(self) -> LinearCode:
        return LinearCode(algebra.row_basis(self.eval_matrix, self.q), self.q)

    def basis_at(self, point) -> np.ndarray:
        return monomial_values(np.asarray(point)[None, :], self.exponents, self.q)[:, 0]

    def evaluate(self, coeffs, points=None) -> np.ndarray:
        """Evaluate the polynomial with monomial coefficients ``coeffs`` at ``points`` (default: support)."""
        V = self.eval_matrix if points is None else monomial_values(points, self.exponents, self.q)
        c = np.asarray(coeffs, dtype=np.int64).reshape(1, -1)
        return algebra._kernels.matmul(c, V, self.q)[0]

    def descriptor(self) -> dict:
        return {
            "family": "qary-rm",
            "params": {"q": self.q, "t": self.t, "rho": self.rho, "strict": self.strict},
        }


def build_qary_rm(q: int, t: int, rho: int, support, strict: bool = False) -> QaryRM:
    return QaryRM(q, t, rho, support, strict)


def sample_support(q: int, t: int, n: int, rng) -> np.ndarray:
    """``n`` distinct points of F_q^t drawn without replacement."""
    if n > q**t:
        raise ParameterError("support larger than F_q^t")
    idx = rng.sample(q**t, n)
    return np.array([[(i // q**v) % q for v in range(t)] for i in idx], dtype=np.int64).reshape(n, t)


def interpolate_eval(values, positions, basis_eval, basis_at_y, q: int) -> int:
    """Value at ``y`` of any function in the space matching ``values`` on ``positions``.

    ``basis_eval`` is the (dim, n) matrix of basis functions at the support and
    ``basis_at_y`` their values at ``y``.  Raises ``Inconsistent`` when no
    function in the space matches and :class:`AmbiguousAtY` when the value at
    ``y`` differs across matching functions.
    """
    positions = list(positions)
    if not positions:
        raise ParameterError("need at least one position")
    values = np.asarray(values, dtype=np.int64)
    A = np.asarray(basis_eval, dtype=np.int64)[:, positions].T
    b = values[positions] if values.shape[0] == np.asarray(basis_eval).shape[1] else values
    sol = algebra.solve_linear(A, b, q, mode="all")
    by = np.asarray(basis_at_y, dtype=np.int64) % q
    if sol.kernel.size and algebra._kernels.matmul(sol.kernel, by[:, None], q).any():
        raise AmbiguousAtY("value at y is not determined by the given positions")
    return int(algebra._kernels.matmul(sol.particular[None, :], by[:, None], q)[0, 0])


def determined_at(positions, basis_eval, basis_at_y, q: int) -> bool:
    """Whether evaluation at ``y`` is a function of the values on ``positions``."""
    A = np.asarray(basis_eval, dtype=np.int64)[:, list(positions)].T
    K = algebra.nullspace(A, q)
    by = np.asarray(basis_at_y, dtype=np.int64)[:, None] % q
    return not (K.size and algebra._kernels.matmul(K, by, q).any())


# ---------------------------------------------------------------------------
# s-ideal codes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class IdealCode:
    """``[sn, n]`` code with generator ``(I_n | IM(g_1) | ... | IM(g_{s-1}))``.

    Generators may be vectors over F_q or :class:`ExtVector` values, in which
    case matrices carry a trailing axis of extension coordinates.
    """

    gens: tuple
    ring: RingCtx
    field_ctx: FieldCtx | None = None

    @property
    def s(self) -> int:
        return len(self.gens) + 1

    @property
    def n(self) -> int:
        return self.ring.n

    @cached_property
    def blocks(self) -> list[np.ndarray]:
        return [algebra.ideal_matrix(g, self.ring) for g in self.gens]

    def _identity(self, size: int) -> np.ndarray:
        eye = np.eye(size, dtype=np.int64)
        if self.field_ctx is None:
            return eye
        out = np.zeros((size, size, self.field_ctx.m), dtype=np.int64)
        out[..., 0] = eye
        return out

    @cached_property
    def G(self) -> np.ndarray:
        return np.concatenate([self._identity(self.n)] + self.blocks, axis=1)

    @cached_property
    def H(self) -> np.ndarray:
        """``(-A^T | I)`` where ``A`` is the concatenation of the ideal blocks."""
        q = self.ring.coeff_modulus
        A = np.concatenate(self.blocks, axis=1)
        At = np.swapaxes(A, 0, 1)
        return np.concatenate([(-At) % q, self._identity(At.shape[0])], axis=1)

    def check_duality(self) -> bool:
        q = self.ring.coeff_modulus
        Gt = np.swapaxes(self.G, 0, 1)
        if self.field_ctx is None:
            prod = algebra._kernels.matmul(self.H, Gt, q)
        else:
            prod = algebra.ext_matmul(self.field_ctx, self.H, Gt)
        return not prod.any()


def build_ideal_code(gens, ring: RingCtx) -> IdealCode:
    gens = tuple(gens)
    if not gens:
        raise ParameterError("need at least one generator (s >= 2)")
    ctx = None
    if isinstance(gens[0], ExtVector):
        ctx = gens[0].ctx
        if any(not isinstance(g, ExtVector) or g.ctx != ctx for g in gens):
            raise ParameterError("generators must share one field context")
        if ctx.q != ring.coeff_modulus:
            raise ParameterError("ring modulus must equal the field characteristic")
    else:
        gens = tuple(np.asarray(g, dtype=np.int64) % ring.coeff_modulus for g in gens)
    if any(len(g) != ring.n for g in gens):
        raise ParameterError("every generator must have length n")
    code = IdealCode(gens, ring, ctx)
    if not code.check_duality():
        raise AssertionError("parity check failed for ideal code")
    return code
