"""Compare the numba and numpy kernel backends on representative workloads.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Both backends
are called directly through ``hezoo._kernels``, so ``HEZOO_BACKEND`` does not
matter here.  Outputs are cross-checked before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hezoo import _kernels as K
from hezoo.rng import RngStream


def workloads(rng: RngStream):
    q_small, q_big = 251, 1073738753
    yield "rref 64x96 mod 251", "rref", (rng.integers(q_small, (64, 96)), np.int64(q_small))
    yield "matmul 128x128 mod 2^30", "matmul", (rng.integers(q_big, (128, 128)), rng.integers(q_big, (128, 128)), np.int64(q_big))
    yield "negacyclic n=256 mod 2^30", "negacyclic", (rng.integers(q_big, 256), rng.integers(q_big, 256), np.int64(q_big))
    yield "polymul 512x512 mod 251", "polymul", (rng.integers(q_small, 512), rng.integers(q_small, 512), np.int64(q_small))


def best_time(fn, args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")
    print(f"{'workload':32s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, op, data in workloads(RngStream("bench")):
        nb, npy = getattr(K.numba_kernels, op), getattr(K.numpy_kernels, op)
        a, b = nb(*data), npy(*data)  # also triggers compilation
        for x, y in zip(a if isinstance(a, tuple) else (a,), b if isinstance(b, tuple) else (b,)):
            if not np.array_equal(x, y):
                raise SystemExit(f"{name}: backends disagree")
        t_nb, t_np = best_time(nb, data, args.repeat), best_time(npy, data, args.repeat)
        print(f"{name:32s} {1e3 * t_nb:10.3f} {1e3 * t_np:10.3f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
