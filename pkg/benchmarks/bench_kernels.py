"""Benchmark the jit-compiled sampling kernel against the pure-numpy fallback.

Both backends consume identical counter-based uniform streams, so besides
timing the script asserts that their outputs agree to floating-point
rounding.

Usage:  python3 benchmarks/bench_kernels.py [--n N] [--replicates R]
"""

import argparse
import time

import numpy as np

from exspacings import SimConfig, sample_cn, w1
from exspacings._kernels import HAVE_NUMBA, warmup


def bench(backend: str, cfg: SimConfig, repeats: int = 3):
    best = float("inf")
    values = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        values = sample_cn(w1(), cfg, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, values


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=1000, help="sample size per draw")
    parser.add_argument("--replicates", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    cfg = SimConfig(n=args.n, lam=1.0, seed=args.seed, replicates=args.replicates)
    draws = args.n * args.replicates

    t_np, v_np = bench("numpy", cfg)
    print(f"numpy : {t_np:8.4f} s   {draws / t_np:12.3e} exponential draws/s")

    if not HAVE_NUMBA:
        print("numba : not installed; skipping")
        return

    warmup()
    t_nb, v_nb = bench("numba", cfg)
    print(f"numba : {t_nb:8.4f} s   {draws / t_nb:12.3e} exponential draws/s")
    print(f"speedup: {t_np / t_nb:.2f}x")

    gap = np.max(np.abs(v_nb - v_np) / np.maximum(np.abs(v_np), 1e-300))
    print(f"max relative gap between backends: {gap:.3e}")
    assert gap < 1e-12, "backends disagree beyond rounding"


if __name__ == "__main__":
    main()
