"""Time each kernel's numba and numpy implementations on the same inputs.

    python3 benchmarks/bench_kernels.py [--N 4096] [--repeat 5]

The first numba call (compilation or cache load) is excluded.  Outputs are
compared before timing; a mismatch aborts the run.
"""
import argparse
import time

import numpy as np

from nlroth import kernels
from nlroth._accel import HAVE_NUMBA


def inputs(N, rng):
    M = int(np.sqrt(N))
    y = np.arange(1, M + 1, dtype=np.int64)
    bits = (rng.random(N) < 0.3).astype(np.uint8)
    f = np.exp(2j * np.pi * rng.random((3, N)))
    ids = rng.integers(0, N // 16, N).astype(np.int64)
    return {
        "shift_counts": (bits, np.stack([y, y * y], axis=1)),
        "shifted_product_sums": (f, np.stack([y, y * y], axis=1)),
        "pair_shift_sum": (f[0], f[1], y, y * y),
        "r3_counts": (M,),
        "fourier_sums": (f[0], np.arange(1, N + 1, dtype=np.int64), rng.random(64)),
        "greedy_free": (np.arange(1, N // 4 + 1, dtype=np.int64), N // 4, 1, True),
        "creates_configuration": (np.r_[0, bits].astype(np.uint8), N // 2, 1, True, N),
        "atom_abs_sum": (ids, f[0], N // 16),
        "max_progression_sum": (f[0].real.copy(), 7),
    }


def best_of(fn, args, repeat):
    t = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        t.append(time.perf_counter() - t0)
    return min(t)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--N", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    print(f"{'kernel':24s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>8s}")
    for name, a in inputs(args.N, rng).items():
        loop, vec = kernels.KERNELS[name]
        r1, r2 = loop(*a), vec(*a)
        if not np.allclose(r1, r2, rtol=1e-9, atol=1e-9):
            raise SystemExit(f"{name}: backends disagree")
        t1, t2 = best_of(loop, a, args.repeat), best_of(vec, a, args.repeat)
        print(f"{name:24s} {1e3 * t1:12.3f} {1e3 * t2:12.3f} {t2 / t1:8.1f}")


if __name__ == "__main__":
    main()
