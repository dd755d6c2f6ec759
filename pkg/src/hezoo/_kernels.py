"""Hot modular-arithmetic kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time from ``HEZOO_BACKEND``
(``numba`` or ``numpy``).  When numba is not importable the numpy path is
used regardless.  Both paths operate on int64 arrays and require the modulus
to stay below ``SMALL_MODULUS_LIMIT`` so that a single product fits in int64;
larger moduli are routed to an object-dtype path with Python integers.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

SMALL_MODULUS_LIMIT = 1 << 31

try:  # pragma: no cover - import guard
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


_requested = os.environ.get("HEZOO_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"HEZOO_BACKEND must be 'numba' or 'numpy', got {_requested!r}")
BACKEND = "numba" if (_requested == "numba" and HAVE_NUMBA) else "numpy"


# ---------------------------------------------------------------------------
# numba kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _inv_mod_nb(a, q):
    t, new_t = 0, 1
    r, new_r = q, a % q
    while new_r != 0:
        quo = r // new_r
        t, new_t = new_t, t - quo * new_t
        r, new_r = new_r, r - quo * new_r
    if t < 0:
        t += q
    return t


@njit(cache=True)
def _rref_nb(A, q):
    A = A.copy()
    rows, cols = A.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = -1
        for i in range(r, rows):
            if A[i, c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(c, cols):
                tmp = A[r, j]
                A[r, j] = A[p, j]
                A[p, j] = tmp
        inv = _inv_mod_nb(A[r, c], q)
        for j in range(c, cols):
            A[r, j] = (A[r, j] * inv) % q
        for i in range(rows):
            if i != r:
                f = A[i, c]
                if f != 0:
                    for j in range(c, cols):
                        A[i, j] = (A[i, j] - f * A[r, j]) % q
        pivots[r] = c
        r += 1
    return A, pivots[:r]


@njit(cache=True)
def _matmul_nb(A, B, q):
    n, k = A.shape
    m = B.shape[1]
    out = np.zeros((n, m), dtype=np.int64)
    for i in range(n):
        for t in range(k):
            a = A[i, t]
            if a == 0:
                continue
            for j in range(m):
                out[i, j] = (out[i, j] + a * B[t, j]) % q
    return out


@njit(cache=True)
def _negacyclic_nb(a, b, q):
    n = a.shape[0]
    out = np.zeros(n, dtype=np.int64)
    for i in range(n):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(n):
            k = i + j
            prod = (ai * b[j]) % q
            if k < n:
                out[k] = (out[k] + prod) % q
            else:
                out[k - n] = (out[k - n] - prod) % q
    return out


@njit(cache=True)
def _polymul_nb(a, b, q):
    la, lb = a.shape[0], b.shape[0]
    out = np.zeros(la + lb - 1, dtype=np.int64)
    for i in range(la):
        ai = a[i]
        if ai == 0:
            continue
        for j in range(lb):
            out[i + j] = (out[i + j] + ai * b[j]) % q
    return out


# ---------------------------------------------------------------------------
# numpy kernels
# ---------------------------------------------------------------------------


def _rref_np(A, q):
    q = int(q)
    A = np.array(A, dtype=np.int64, copy=True)
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            A[[r, p]] = A[[p, r]]
        inv = pow(int(A[r, c]), -1, q)
        A[r, c:] = (A[r, c:] * inv) % q
        f = A[:, c].copy()
        f[r] = 0
        A[:, c:] = (A[:, c:] - np.outer(f, A[r, c:]) % q) % q
        pivots.append(c)
        r += 1
    return A, np.array(pivots, dtype=np.int64)


def _matmul_np(A, B, q):
    k = A.shape[1]
    if k == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    # chunk the inner dimension so partial sums of products stay below 2**63
    step = max(1, ((1 << 62) // max(1, (q - 1) ** 2)))
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for s in range(0, k, step):
        out = (out + (A[:, s : s + step] @ B[s : s + step]) % q) % q
    return out


def _negacyclic_np(a, b, q):
    n = a.shape[0]
    full = _polymul_np(a, b, q)
    out = full[:n].copy()
    out[: n - 1] = (out[: n - 1] - full[n:]) % q
    return out


def _polymul_np(a, b, q):
    # outer products are < q**2 < 2**62; accumulate along anti-diagonals with a mod after each add
    la, lb = a.shape[0], b.shape[0]
    prods = np.outer(a, b) % q
    out = np.zeros(la + lb - 1, dtype=np.int64)
    for i in range(la):
        out[i : i + lb] = (out[i : i + lb] + prods[i]) % q
    return out


numba_kernels = SimpleNamespace(
    rref=_rref_nb, matmul=_matmul_nb, negacyclic=_negacyclic_nb, polymul=_polymul_nb
)
numpy_kernels = SimpleNamespace(
    rref=_rref_np, matmul=_matmul_np, negacyclic=_negacyclic_np, polymul=_polymul_np
)
_active = numba_kernels if BACKEND == "numba" else numpy_kernels


# ---------------------------------------------------------------------------
# object-dtype path for large moduli
# ---------------------------------------------------------------------------


def _rref_obj(A, q):
    M = [[int(x) % q for x in row] for row in np.asarray(A, dtype=object)]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = pow(M[r][c], -1, q)
        M[r] = [(x * inv) % q for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(x - f * y) % q for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return np.array(M, dtype=object).reshape(rows, cols), np.array(pivots, dtype=np.int64)


def _small(q: int) -> bool:
    return 1 < q < SMALL_MODULUS_LIMIT


def rref(A, q: int):
    """Reduced row echelon form of ``A`` over Z_q (q prime). Returns ``(R, pivot_columns)``."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError("rref expects a 2-D array")
    if A.shape[0] == 0 or A.shape[1] == 0:
        return A.astype(np.int64 if _small(q) else object), np.zeros(0, dtype=np.int64)
    if _small(q):
        return _active.rref(np.ascontiguousarray(A % q, dtype=np.int64), np.int64(q))
    return _rref_obj(A, q)


def matmul(A, B, q: int):
    """``A @ B`` reduced mod q."""
    A = np.asarray(A)
    B = np.asarray(B)
    if _small(q):
        return _active.matmul(
            np.ascontiguousarray(A % q, dtype=np.int64),
            np.ascontiguousarray(B % q, dtype=np.int64),
            np.int64(q),
        )
    return (A.astype(object) @ B.astype(object)) % q


def negacyclic(a, b, q: int):
    """Product in Z_q[x]/(x^n + 1); coefficient arrays, lowest degree first."""
    if _small(q):
        return _active.negacyclic(
            np.ascontiguousarray(np.asarray(a) % q, dtype=np.int64),
            np.ascontiguousarray(np.asarray(b) % q, dtype=np.int64),
            np.int64(q),
        )
    return np.array(negacyclic_int(list(a), list(b), q), dtype=object)


def polymul(a, b, q: int):
    """Full (unreduced) polynomial product with coefficients mod q."""
    if _small(q):
        return _active.polymul(
            np.ascontiguousarray(np.asarray(a) % q, dtype=np.int64),
            np.ascontiguousarray(np.asarray(b) % q, dtype=np.int64),
            np.int64(q),
        )
    a = [int(x) for x in a]
    b = [int(x) for x in b]
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return np.array([c % q for c in out], dtype=object)


def negacyclic_int(a, b, q: int | None = None) -> list[int]:
    """Schoolbook negacyclic product over Z (``q=None``) or Z_q with Python integers."""
    n = len(a)
    if len(b) != n:
        raise ValueError("operands must have equal length")
    out = [0] * n
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            k = i + j
            if k < n:
                out[k] += x * y
            else:
                out[k - n] -= x * y
    if q is not None:
        out = [c % q for c in out]
    return out
