"""Time the dense kernels with numba against the pure-numpy fallback.

    python benchmarks/bench_kernels.py --sizes 64,128,256 --repeat 3

Both backends get the same random tables; the max deviation between their
outputs is printed next to the timings.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wdirichlet import _kernels


def random_table(M: int, density: float, rng) -> np.ndarray:
    A = np.zeros((M, M), dtype=np.complex128)
    mask = rng.random((M, M)) < density
    A[mask] = rng.normal(size=mask.sum()) / M
    A[0, 0] = 1.0 + 0.5 * rng.random()
    return A


def best_of(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="32,64,128,256")
    ap.add_argument("--density", type=float, default=0.02)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if not _kernels.HAVE_NUMBA:
        print("numba not importable; only the numpy backend can run")
        return
    rng = np.random.default_rng(args.seed)
    # compile outside the timed region
    warm = random_table(8, 0.5, rng)
    _kernels.convolve_numba(warm, warm)
    _kernels.invert_numba(warm)

    print(f"{'kernel':<10}{'M':>6}{'numba s':>12}{'numpy s':>12}{'speedup':>10}{'max diff':>12}")
    for M in (int(s) for s in args.sizes.split(",")):
        A = random_table(M, args.density, rng)
        B = random_table(M, args.density, rng)
        cases = (
            ("convolve", lambda: _kernels.convolve_numba(A, B), lambda: _kernels.convolve_numpy(A, B)),
            ("invert", lambda: _kernels.invert_numba(A), lambda: _kernels.invert_numpy(A)),
        )
        for name, fast, slow in cases:
            diff = float(np.max(np.abs(fast() - slow())))
            tf, ts = best_of(fast, args.repeat), best_of(slow, args.repeat)
            print(f"{name:<10}{M:>6}{tf:>12.4f}{ts:>12.4f}{ts / tf:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
