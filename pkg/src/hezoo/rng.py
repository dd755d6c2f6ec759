"""Deterministic seeded randomness.

Every probabilistic choice in the library draws from an :class:`RngStream`,
a SHAKE-256 counter-mode byte stream keyed by a 32-byte seed.  Equal seeds
give equal streams on every platform, which is what makes ciphertext bytes
reproducible from ``(seed, params, message)``.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

_BLOCK = 4096
_DOMAIN = b"hezoo-rng-v1"


def normalize_seed(seed) -> bytes:
    if isinstance(seed, RngStream):
        return seed.seed
    if isinstance(seed, (bytes, bytearray)):
        if len(seed) != 32:
            raise ValueError("byte seeds must be exactly 32 bytes")
        return bytes(seed)
    if isinstance(seed, int):
        if seed < 0 or seed >= 1 << 256:
            raise ValueError("integer seed must be in [0, 2**256)")
        return seed.to_bytes(32, "little")
    if isinstance(seed, str):
        return hashlib.sha256(seed.encode()).digest()
    raise TypeError(f"unsupported seed type {type(seed).__name__}")


class RngStream:
    """Single-owner deterministic random stream.

    Not thread-safe; give each worker its own stream via :meth:`fork`.
    """

    def __init__(self, seed):
        self.seed = normalize_seed(seed)
        self.counter = 0
        self._buf = b""
        self._pos = 0

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed.hex()[:16]}..., counter={self.counter})"

    def fork(self, label: str) -> "RngStream":
        """Independent child stream; depends only on the seed and the label."""
        return RngStream(hashlib.sha256(self.seed + b"/" + label.encode()).digest())

    # -- raw bytes --------------------------------------------------------

    def _refill(self) -> None:
        h = hashlib.shake_256(_DOMAIN + self.seed + self.counter.to_bytes(8, "little"))
        self._buf = self._buf[self._pos :] + h.digest(_BLOCK)
        self._pos = 0
        self.counter += 1

    def bytes(self, k: int) -> bytes:
        while len(self._buf) - self._pos < k:
            self._refill()
        out = self._buf[self._pos : self._pos + k]
        self._pos += k
        return out

    def randbits(self, k: int) -> int:
        if k <= 0:
            return 0
        x = int.from_bytes(self.bytes((k + 7) // 8), "little")
        return x & ((1 << k) - 1)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        while True:
            x = self.randbits(k)
            if x < n:
                return x

    def randrange(self, lo: int, hi: int) -> int:
        return lo + self.randbelow(hi - lo)

    # -- vectorized helpers ----------------------------------------------

    def integers(self, high: int, size) -> np.ndarray:
        """Uniform int64 array in [0, high); ``high`` must be below 2**62."""
        if high <= 0 or high >= 1 << 62:
            raise ValueError("integers() supports 0 < high < 2**62")
        shape = (size,) if isinstance(size, (int, np.integer)) else tuple(size)
        total = int(np.prod(shape)) if shape else 1
        if high == 1:
            return np.zeros(shape, dtype=np.int64)
        mask = np.uint64((1 << (high - 1).bit_length()) - 1)
        out = np.empty(0, dtype=np.int64)
        while out.size < total:
            want = max(8, 2 * (total - out.size))
            raw = np.frombuffer(self.bytes(8 * want), dtype="<u8") & mask
            out = np.concatenate([out, raw[raw < np.uint64(high)].astype(np.int64)])
        return out[:total].reshape(shape)

    def big_integers(self, high: int, size: int) -> list[int]:
        """Uniform Python ints in [0, high) for arbitrarily large ``high``."""
        if high < 1 << 62:
            return [int(x) for x in self.integers(high, size)]
        return [self.randbelow(high) for _ in range(size)]

    def random(self, size=None):
        """Uniform floats in [0, 1) with 53 bits of precision."""
        n = 1 if size is None else int(np.prod(size))
        raw = np.frombuffer(self.bytes(8 * n), dtype="<u8") >> np.uint64(11)
        vals = raw.astype(np.float64) * (1.0 / (1 << 53))
        return float(vals[0]) if size is None else vals.reshape(size)

    def bernoulli(self, p: float, size) -> np.ndarray:
        return self.random(size) < p

    def sample(self, n: int, k: int) -> list[int]:
        """``k`` distinct indices from ``range(n)`` in draw order (partial Fisher-Yates)."""
        if not 0 <= k <= n:
            raise ValueError("sample size out of range")
        # swaps kept in a dict so huge populations cost O(k) memory
        swapped: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.randbelow(n - i)
            vi, vj = swapped.get(i, i), swapped.get(j, j)
            swapped[j] = vi
            out.append(vj)
        return out

    def permutation(self, n: int) -> list[int]:
        return self.sample(n, n)

    def nonzero(self, q: int, size) -> np.ndarray:
        return self.integers(q - 1, size) + 1

    def ternary(self, size) -> np.ndarray:
        return self.integers(3, size) - 1


def discrete_gaussian_table(sigma: float, tail: float = 6.0):
    """Support and unnormalized weights of a discrete Gaussian cut at ``tail*sigma``."""
    bound = max(1, int(math.ceil(tail * sigma)))
    xs = np.arange(-bound, bound + 1, dtype=np.int64)
    weights = np.exp(-(xs.astype(np.float64) ** 2) / (2.0 * sigma * sigma))
    return xs, weights


def sample_discrete_gaussian(rng: RngStream, sigma: float, size: int, tail: float = 6.0) -> np.ndarray:
    """Zero-mean discrete Gaussian by rejection from a tail-cut table; ``sigma=0`` gives zeros."""
    if sigma <= 0:
        return np.zeros(size, dtype=np.int64)
    xs, weights = discrete_gaussian_table(sigma, tail)
    out: list[int] = []
    while len(out) < size:
        need = size - len(out)
        idx = rng.integers(len(xs), 2 * need + 4)
        u = rng.random(2 * need + 4)
        acc = idx[u < weights[idx]]
        out.extend(int(xs[i]) for i in acc[:need])
    return np.array(out, dtype=np.int64)
