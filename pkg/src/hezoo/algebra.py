"""Finite fields, extension fields, linear algebra over F_q, and polynomial rings.

Conventions
-----------
* Vectors and matrices over a prime field are plain int64 numpy arrays with
  canonical entries in ``[0, q)``; the modulus travels as an argument.
* An element of ``F_{q^m}`` is stored by its power-basis coordinates
  ``(x_0, ..., x_{m-1})`` in ``{1, alpha, ..., alpha^{m-1}}``.  Batches of
  elements are arrays whose last axis has length ``m``.
* The poly map sends ``(v_1, ..., v_n)`` to ``sum v_i X^(i-1)`` so that
  ``(1, 0, ..., 0)`` is the multiplicative identity of ``F_q[X]/<f>``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
from sympy import isprime

from . import _kernels
from .errors import Inconsistent, ParameterError


# ---------------------------------------------------------------------------
# linear algebra over F_q
# ---------------------------------------------------------------------------


def _dtype(q: int):
    return np.int64 if q < _kernels.SMALL_MODULUS_LIMIT else object


def as_field_array(a, q: int) -> np.ndarray:
    return np.asarray(a, dtype=_dtype(q)) % q


def rref(A, q: int):
    return _kernels.rref(A, q)


def rank(A, q: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(A, q)[1])


def nullspace(A, q: int) -> np.ndarray:
    """Basis (as rows) of ``{x : A x = 0}`` over F_q."""
    A = np.asarray(A)
    cols = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(cols, dtype=_dtype(q))
    R, piv = rref(A, q)
    piv = [int(p) for p in piv]
    free = [c for c in range(cols) if c not in piv]
    basis = np.zeros((len(free), cols), dtype=_dtype(q))
    for t, f in enumerate(free):
        basis[t, f] = 1
        for r, p in enumerate(piv):
            basis[t, p] = (-int(R[r, f])) % q
    return basis


def row_basis(A, q: int) -> np.ndarray:
    """Rows of the reduced echelon form spanning the row space of ``A``."""
    A = np.asarray(A)
    if A.size == 0:
        return np.zeros((0, A.shape[1] if A.ndim == 2 else 0), dtype=_dtype(q))
    R, piv = rref(A, q)
    return np.asarray(R[: len(piv)], dtype=_dtype(q))


def inverse(A, q: int) -> np.ndarray:
    A = np.asarray(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("inverse needs a square matrix")
    R, piv = rref(np.hstack([as_field_array(A, q), np.eye(n, dtype=_dtype(q))]), q)
    if len(piv) < n or int(piv[n - 1]) != n - 1:
        raise ZeroDivisionError("matrix is singular over F_q")
    return np.asarray(R[:, n:], dtype=_dtype(q))


def det(A, q: int) -> int:
    """Determinant over F_q by elimination."""
    M = [[int(x) % q for x in row] for row in np.asarray(A)]
    n = len(M)
    d = 1
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c]), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d = d * M[c][c] % q
        inv = pow(M[c][c], -1, q)
        for i in range(c + 1, n):
            if M[i][c]:
                f = M[i][c] * inv % q
                M[i] = [(x - f * y) % q for x, y in zip(M[i], M[c])]
    return d % q


class AffineSpace(NamedTuple):
    """Solution set ``particular + span(kernel rows)``."""

    particular: np.ndarray
    kernel: np.ndarray


def solve_linear(A, b, q: int, mode: str = "any"):
    """Solve ``A x = b`` over F_q by Gaussian elimination.

    ``mode="any"`` returns one solution (free variables set to 0);
    ``mode="all"`` returns an :class:`AffineSpace`.  Raises
    :class:`~hezoo.errors.Inconsistent` when there is no solution.
    """
    if mode not in ("any", "all"):
        raise ValueError("mode must be 'any' or 'all'")
    A = as_field_array(A, q)
    b = as_field_array(b, q).reshape(-1)
    rows, cols = A.shape
    if b.shape[0] != rows:
        raise ValueError("dimension mismatch between A and b")
    R, piv = rref(np.hstack([A, b[:, None]]), q)
    piv = [int(p) for p in piv]
    if piv and piv[-1] == cols:
        raise Inconsistent("right-hand side is outside the column space")
    x = np.zeros(cols, dtype=_dtype(q))
    for r, p in enumerate(piv):
        x[p] = int(R[r, cols])
    if mode == "any":
        return x
    return AffineSpace(x, nullspace(A, q))


def hadamard(u, v, q: int | None = None):
    """Componentwise product of equal-length vectors."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ValueError("hadamard needs equal lengths")
    out = u * v
    return out % q if q is not None else out


def support(v) -> set[int]:
    return {int(i) for i in np.nonzero(np.asarray(v))[0]}


def hamming_weight(v) -> int:
    return int(np.count_nonzero(np.asarray(v)))


# ---------------------------------------------------------------------------
# univariate polynomials over F_q (lists, lowest degree first)
# ---------------------------------------------------------------------------


def poly_trim(a: Sequence[int]) -> list[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_rem(a: Sequence[int], f: Sequence[int], q: int) -> list[int]:
    a = [x % q for x in a]
    f = poly_trim([x % q for x in f])
    if not f:
        raise ZeroDivisionError("division by the zero polynomial")
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, q)
    a = poly_trim(a)
    while len(a) - 1 >= df:
        c = a[-1] * inv_lead % q
        shift = len(a) - 1 - df
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % q
        a = poly_trim(a)
    return a


def is_irreducible(f: Sequence[int], q: int) -> bool:
    """Exhaustive trial division by every monic polynomial of degree <= deg(f)/2."""
    f = poly_trim([x % q for x in f])
    d = len(f) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(q), repeat=k):
            if not poly_rem(f, list(low) + [1], q):
                return False
    return True


def find_irreducible(q: int, m: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree ``m`` (lexicographic on low coefficients)."""
    for idx in range(1, q**m):
        low = [(idx // q**i) % q for i in range(m)]
        if low[0] == 0:
            continue
        f = low + [1]
        if is_irreducible(f, q):
            return tuple(f)
    raise ParameterError(f"no irreducible polynomial of degree {m} over F_{q}")


def reduction_matrix(f: Sequence[int], q: int, max_degree: int) -> np.ndarray:
    """Row ``k`` holds the coefficients of ``X^k mod f`` for ``k = 0..max_degree``."""
    f = [x % q for x in f]
    n = len(f) - 1
    if f[-1] != 1:
        raise ParameterError("reduction polynomial must be monic")
    R = np.zeros((max_degree + 1, n), dtype=np.int64)
    cur = np.zeros(n, dtype=np.int64)
    cur[0] = 1 if n > 0 else 0
    tail = np.array(f[:n], dtype=np.int64)
    for k in range(max_degree + 1):
        R[k] = cur
        top = int(cur[n - 1])
        cur = np.concatenate([[0], cur[:-1]]).astype(np.int64)
        if top:
            cur = (cur - top * tail) % q
    return R


def coeff_width(q: int) -> int:
    """Bytes per coefficient in the fixed-width little-endian encoding."""
    return max(1, ((q - 1).bit_length() + 7) // 8)


def pack_coeffs(values, q: int) -> bytes:
    w = coeff_width(q)
    return b"".join((int(v) % q).to_bytes(w, "little") for v in np.asarray(values, dtype=object).reshape(-1))


def unpack_coeffs(data: bytes, q: int, count: int) -> list[int]:
    w = coeff_width(q)
    if len(data) != w * count:
        from .errors import Corrupt

        raise Corrupt(f"expected {w * count} bytes, got {len(data)}")
    out = [int.from_bytes(data[i * w : (i + 1) * w], "little") for i in range(count)]
    if any(v >= q for v in out):
        from .errors import Corrupt

        raise Corrupt("coefficient out of range")
    return out


# ---------------------------------------------------------------------------
# F_q and F_{q^m}
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldCtx:
    """``F_{q^m}`` presented as ``F_q[alpha]/<modulus_poly>``; ``m = 1`` is the prime field."""

    q: int
    m: int = 1
    modulus_poly: tuple[int, ...] | None = None

    def __post_init__(self):
        if not isprime(self.q):
            raise ParameterError(f"q={self.q} is not prime")
        if self.m < 1:
            raise ParameterError("extension degree must be >= 1")
        if self.m == 1:
            object.__setattr__(self, "modulus_poly", None)
            return
        if self.q >= 1 << 16:
            raise ParameterError("extension fields are supported for q < 2**16 only")
        f = self.modulus_poly
        if f is None:
            f = find_irreducible(self.q, self.m)
        f = tuple(int(c) % self.q for c in f)
        if len(f) != self.m + 1 or f[-1] != 1:
            raise ParameterError("modulus_poly must be monic of degree m")
        if not is_irreducible(f, self.q):
            raise ParameterError(f"modulus_poly {f} is reducible over F_{self.q}")
        object.__setattr__(self, "modulus_poly", f)

    @property
    def order(self) -> int:
        return self.q**self.m

    @cached_property
    def _red(self) -> np.ndarray:
        if self.m == 1:
            return np.ones((1, 1), dtype=np.int64)
        return reduction_matrix(self.modulus_poly, self.q, 2 * self.m - 2)

    def descriptor(self) -> dict:
        d = {"q": self.q, "m": self.m}
        if self.modulus_poly is not None:
            d["modulus_poly"] = list(self.modulus_poly)
        return d

    # -- batch arithmetic on coordinate arrays (last axis = m) ------------

    def add(self, a, b):
        return (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.q

    def sub(self, a, b):
        return (np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)) % self.q

    def neg(self, a):
        return (-np.asarray(a, dtype=np.int64)) % self.q

    def scale(self, c, a):
        """Multiply elements ``a`` by F_q scalars ``c`` (broadcast over the last axis)."""
        c = np.asarray(c, dtype=np.int64)
        return (c[..., None] * np.asarray(a, dtype=np.int64)) % self.q

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        m, q = self.m, self.q
        if m == 1:
            return (a * b) % q
        conv = np.zeros(a.shape[:-1] + (2 * m - 1,), dtype=np.int64)
        for i in range(m):
            conv[..., i : i + m] = (conv[..., i : i + m] + a[..., i : i + 1] * b) % q
        return (conv @ self._red) % q

    def pow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        result = np.broadcast_to(self.one_coords(), a.shape).copy()
        base = a % self.q
        while e > 0:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(np.all(a % self.q == 0, axis=-1)):
            raise ZeroDivisionError("zero has no inverse")
        return self.pow(a, self.order - 2)

    def zero_coords(self) -> np.ndarray:
        return np.zeros(self.m, dtype=np.int64)

    def one_coords(self) -> np.ndarray:
        z = np.zeros(self.m, dtype=np.int64)
        z[0] = 1
        return z

    def random(self, rng, size) -> np.ndarray:
        shape = (size,) if isinstance(size, (int, np.integer)) else tuple(size)
        return rng.integers(self.q, shape + (self.m,))

    # -- element constructors --------------------------------------------

    def element(self, coeffs) -> "ExtFieldElement":
        c = np.zeros(self.m, dtype=np.int64)
        coeffs = list(coeffs)
        if len(coeffs) > self.m:
            raise ValueError("too many coordinates")
        c[: len(coeffs)] = coeffs
        return ExtFieldElement(self, tuple(int(x) % self.q for x in c))

    @property
    def zero(self) -> "ExtFieldElement":
        return self.element([0])

    @property
    def one(self) -> "ExtFieldElement":
        return self.element([1])

    @property
    def alpha(self) -> "ExtFieldElement":
        if self.m == 1:
            raise ParameterError("prime field has no generator alpha")
        return self.element([0, 1])

    def elements(self):
        """Iterate over every field element (desk-scale only)."""
        for idx in range(self.order):
            yield self.element([(idx // self.q**i) % self.q for i in range(self.m)])

    def pack(self, coords) -> bytes:
        return pack_coeffs(np.asarray(coords).reshape(-1), self.q)

    def unpack(self, data: bytes, count: int) -> np.ndarray:
        vals = unpack_coeffs(data, self.q, count * self.m)
        return np.array(vals, dtype=np.int64).reshape(count, self.m)


@dataclass(frozen=True)
class ExtFieldElement:
    ctx: FieldCtx
    coeffs: tuple[int, ...]

    def _check(self, other: "ExtFieldElement"):
        if not isinstance(other, ExtFieldElement) or other.ctx != self.ctx:
            raise ParameterError("mismatched field contexts")

    def _wrap(self, arr) -> "ExtFieldElement":
        return ExtFieldElement(self.ctx, tuple(int(x) for x in np.asarray(arr).reshape(-1)))

    def __add__(self, other):
        self._check(other)
        return self._wrap(self.ctx.add(self.coeffs, other.coeffs))

    def __sub__(self, other):
        self._check(other)
        return self._wrap(self.ctx.sub(self.coeffs, other.coeffs))

    def __neg__(self):
        return self._wrap(self.ctx.neg(self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return self._wrap(self.ctx.scale(other, self.coeffs))
        self._check(other)
        return self._wrap(self.ctx.mul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return self._wrap(self.ctx.pow(self.coeffs, e))

    def inverse(self) -> "ExtFieldElement":
        return self._wrap(self.ctx.inv(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


def vec(x: ExtFieldElement) -> np.ndarray:
    """Power-basis coordinates of ``x`` as a length-m vector over F_q."""
    if not isinstance(x, ExtFieldElement):
        raise ParameterError("vec expects an extension-field element")
    return np.array(x.coeffs, dtype=np.int64)


def unvec(ctx: FieldCtx, coords) -> ExtFieldElement:
    coords = np.asarray(coords, dtype=np.int64)
    if coords.shape != (ctx.m,):
        raise ParameterError("coordinate vector has the wrong length")
    return ctx.element(coords)


@dataclass(frozen=True, eq=False)
class ExtVector:
    """Vector in ``F_{q^m}^n``; ``coords[i]`` is ``vec(v_i)``."""

    ctx: FieldCtx
    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=np.int64) % self.ctx.q
        if c.ndim != 2 or c.shape[1] != self.ctx.m:
            raise ParameterError("ExtVector coords must have shape (n, m)")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_elements(cls, elems: Sequence[ExtFieldElement]) -> "ExtVector":
        ctx = elems[0].ctx
        if any(e.ctx != ctx for e in elems):
            raise ParameterError("all coordinates must share one FieldCtx")
        return cls(ctx, np.array([e.coeffs for e in elems], dtype=np.int64))

    @classmethod
    def zeros(cls, ctx: FieldCtx, n: int) -> "ExtVector":
        return cls(ctx, np.zeros((n, ctx.m), dtype=np.int64))

    @classmethod
    def from_base(cls, ctx: FieldCtx, v) -> "ExtVector":
        """Embed a vector over F_q into ``F_{q^m}^n``."""
        v = np.asarray(v, dtype=np.int64) % ctx.q
        c = np.zeros((len(v), ctx.m), dtype=np.int64)
        c[:, 0] = v
        return cls(ctx, c)

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, i) -> ExtFieldElement:
        return self.ctx.element(self.coords[i])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExtVector)
            and other.ctx == self.ctx
            and np.array_equal(other.coords, self.coords)
        )

    def __add__(self, other: "ExtVector") -> "ExtVector":
        _same(self, other)
        return ExtVector(self.ctx, self.ctx.add(self.coords, other.coords))

    def __sub__(self, other: "ExtVector") -> "ExtVector":
        _same(self, other)
        return ExtVector(self.ctx, self.ctx.sub(self.coords, other.coords))

    def __neg__(self) -> "ExtVector":
        return ExtVector(self.ctx, self.ctx.neg(self.coords))

    def scale(self, c) -> "ExtVector":
        """Multiply every coordinate by one element ``c`` of ``F_{q^m}``."""
        c = vec(c) if isinstance(c, ExtFieldElement) else np.asarray(c, dtype=np.int64)
        return ExtVector(self.ctx, self.ctx.mul(self.coords, c))

    def hadamard(self, other: "ExtVector") -> "ExtVector":
        _same(self, other)
        return ExtVector(self.ctx, self.ctx.mul(self.coords, other.coords))

    def is_zero(self) -> bool:
        return not self.coords.any()


def _same(u: ExtVector, v: ExtVector):
    if u.ctx != v.ctx:
        raise ParameterError("mismatched field contexts")
    if len(u) != len(v):
        raise ValueError("length mismatch")


def MAT(v: ExtVector) -> np.ndarray:
    """The m x n matrix whose i-th column is ``vec(v_i)``."""
    return v.coords.T.copy()


def rank_weight(v: ExtVector) -> int:
    return rank(MAT(v), v.ctx.q) if len(v) else 0


def span_basis(v: ExtVector) -> ExtVector:
    """Echelon basis of ``S(v)``, the F_q-span of the coordinates of ``v``."""
    return ExtVector(v.ctx, row_basis(v.coords, v.ctx.q))


def in_span(basis: ExtVector, x) -> bool:
    """Whether every coordinate of ``x`` lies in the F_q-span of ``basis``."""
    q = basis.ctx.q
    xs = x.coords if isinstance(x, ExtVector) else np.atleast_2d(np.asarray(x))
    r = rank(basis.coords, q) if len(basis) else 0
    return rank(np.vstack([basis.coords, xs]), q) == r


# ---------------------------------------------------------------------------
# polynomial rings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingCtx:
    """Either ``Z_q[x]/(x^n + 1)`` (``degree`` set) or ``F_q[X]/<ring_poly>`` (``ring_poly`` set)."""

    coeff_modulus: int
    degree: int | None = None
    ring_poly: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.coeff_modulus < 1:
            raise ParameterError("coefficient modulus must be positive")
        if (self.degree is None) == (self.ring_poly is None):
            raise ParameterError("set exactly one of degree / ring_poly")
        if self.degree is not None:
            n = self.degree
            if n < 1 or n & (n - 1):
                raise ParameterError("negacyclic degree must be a power of two")
        else:
            f = tuple(int(c) % self.coeff_modulus for c in self.ring_poly)
            if len(f) < 2 or f[-1] != 1:
                raise ParameterError("ring_poly must be monic of degree >= 1")
            object.__setattr__(self, "ring_poly", f)

    @property
    def n(self) -> int:
        return self.degree if self.degree is not None else len(self.ring_poly) - 1

    @property
    def negacyclic(self) -> bool:
        return self.degree is not None

    @cached_property
    def _red(self) -> np.ndarray:
        f = self.ring_poly if self.ring_poly is not None else (1,) + (0,) * (self.n - 1) + (1,)
        return reduction_matrix(f, self.coeff_modulus, 2 * self.n - 2)

    def descriptor(self) -> dict:
        d = {"q": self.coeff_modulus}
        if self.negacyclic:
            d["n"] = self.degree
        else:
            d["ring_poly"] = list(self.ring_poly)
        return d

    def to_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)

    def element(self, coeffs) -> "RingElement":
        return RingElement(self, coeffs)

    def zero(self) -> "RingElement":
        return RingElement(self, [0] * self.n)

    def one(self) -> "RingElement":
        return RingElement(self, [1] + [0] * (self.n - 1))


@dataclass(frozen=True)
class RingElement:
    ctx: RingCtx
    coeffs: tuple[int, ...]

    def __init__(self, ctx: RingCtx, coeffs):
        coeffs = [int(c) for c in coeffs]
        if len(coeffs) != ctx.n:
            raise ParameterError(f"expected {ctx.n} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", tuple(c % ctx.coeff_modulus for c in coeffs))

    def _check(self, other):
        if not isinstance(other, RingElement) or other.ctx != self.ctx:
            raise ParameterError("ring context mismatch")

    def __add__(self, other):
        self._check(other)
        return RingElement(self.ctx, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return RingElement(self.ctx, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return RingElement(self.ctx, [-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return RingElement(self.ctx, [a * other for a in self.coeffs])
        self._check(other)
        if self.ctx.negacyclic:
            return negacyclic_mul(self, other)
        return RingElement(self.ctx, ring_mul(self.coeffs, other.coeffs, self.ctx))

    __rmul__ = __mul__

    def centered(self) -> list[int]:
        return [centered(c, self.ctx.coeff_modulus) for c in self.coeffs]


def centered(x: int, q: int) -> int:
    """Representative of ``x mod q`` in ``(-q/2, q/2]``."""
    x %= q
    return x - q if x > q // 2 else x


def negacyclic_mul(a: RingElement, b: RingElement) -> RingElement:
    """Product in ``Z_q[x]/(x^n + 1)``."""
    if a.ctx != b.ctx:
        raise ParameterError("ring context mismatch")
    if not a.ctx.negacyclic:
        raise ParameterError("negacyclic_mul needs a negacyclic ring")
    q = a.ctx.coeff_modulus
    prod = _kernels.negacyclic(np.array(a.coeffs, dtype=object), np.array(b.coeffs, dtype=object), q)
    return RingElement(a.ctx, [int(c) for c in prod])


def ring_mul(u, v, ring: RingCtx) -> np.ndarray:
    """``poly^-1(poly(u) poly(v) mod f)`` for vectors over F_q (``ring.coeff_modulus``)."""
    q = ring.coeff_modulus
    u = np.asarray(u, dtype=np.int64) % q
    v = np.asarray(v, dtype=np.int64) % q
    n = ring.n
    if u.shape != (n,) or v.shape != (n,):
        raise ValueError("vector length must equal the ring degree")
    full = _kernels.polymul(u, v, q)
    return _kernels.matmul(np.asarray(full, dtype=np.int64)[None, :], ring._red, q)[0]


def vector_product(u, v, ring: RingCtx):
    """``u . v``: ring product of two vectors through the poly map.

    Works for vectors over F_q (arrays) and over ``F_{q^m}`` (:class:`ExtVector`);
    in the latter case ``ring.coeff_modulus`` must equal the field characteristic.
    """
    if not isinstance(u, ExtVector) and not isinstance(v, ExtVector):
        return ring_mul(u, v, ring)
    ctx = u.ctx if isinstance(u, ExtVector) else v.ctx
    if ring.coeff_modulus != ctx.q:
        raise ParameterError("ring modulus must match the base field")
    U = u.coords if isinstance(u, ExtVector) else ExtVector.from_base(ctx, u).coords
    V = v.coords if isinstance(v, ExtVector) else ExtVector.from_base(ctx, v).coords
    n = ring.n
    if U.shape[0] != n or V.shape[0] != n:
        raise ValueError("vector length must equal the ring degree")
    pair = ctx.mul(U[:, None, :], V[None, :, :])  # (n, n, m)
    conv = np.zeros((2 * n - 1, ctx.m), dtype=np.int64)
    for i in range(n):
        conv[i : i + n] = (conv[i : i + n] + pair[i]) % ctx.q
    out = np.zeros((n, ctx.m), dtype=np.int64)
    for k in range(2 * n - 1):
        coef = ring._red[k]
        nz = np.nonzero(coef)[0]
        if nz.size:
            out[nz] = (out[nz] + coef[nz, None] * conv[k][None, :]) % ctx.q
    return ExtVector(ctx, out)


def ideal_matrix(v, ring: RingCtx) -> np.ndarray:
    """Row ``i`` (0-based) is ``poly^-1(X^i poly(v) mod f)``.

    Returns an (n, n) array for vectors over F_q, or (n, n, m) for an ExtVector.
    """
    n = ring.n
    rows = []
    for i in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[i] = 1
        r = vector_product(e, v, ring)
        rows.append(r.coords if isinstance(r, ExtVector) else r)
    return np.stack(rows)


def ext_matmul(ctx: FieldCtx, A, B) -> np.ndarray:
    """Matrix product over ``F_{q^m}`` for arrays of shape (r, k, m) and (k, c, m)."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.shape[1] != B.shape[0]:
        raise ValueError("inner dimensions differ")
    out = np.zeros((A.shape[0], B.shape[1], ctx.m), dtype=np.int64)
    for k in range(A.shape[1]):
        out = (out + ctx.mul(A[:, k, None, :], B[None, k, :, :])) % ctx.q
    return out
