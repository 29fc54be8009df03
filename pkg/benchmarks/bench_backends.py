#!/usr/bin/env python3
"""Compare the numba and numpy kernel backends on the hot paths.

Usage:
    python benchmarks/bench_backends.py [--p 20] [--k 3] [--n 100]
                                        [--replicates 200] [--draws 2000000]
"""

import argparse
import time

import numpy as np

from coveq import kernels


def time_call(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_backend(name, p, k, n, replicates, draws):
    impl = kernels._IMPLS[name]
    ns = np.full(k, n, dtype=np.int64)
    sds = np.ones(k)

    # warm-up (JIT compilation for numba, nothing for numpy)
    impl.normal_block(1, 0, 0, 1000)
    impl.raw_stat_batch(p, ns, sds, 1, 2)

    t_norm, _ = time_call(impl.normal_block, 1, 0, 0, draws)
    x = impl.normal_block(2, 0, 0, n * p).reshape(n, p)
    t_scatter, s = time_call(impl.scatter_matrix, x)
    s = s + p * np.eye(p)
    t_chol, _ = time_call(impl.chol_logdet, s)
    t_batch, raw = time_call(impl.raw_stat_batch, p, ns, sds, 1, replicates, repeat=1)

    print(f"\n[{name}]")
    print(f"  normal draws      : {draws / t_norm / 1e6:8.1f} M draws/s")
    print(f"  scatter ({n}x{p})  : {1e6 * t_scatter:8.1f} us")
    print(f"  chol_logdet (p={p}): {1e6 * t_chol:8.1f} us")
    print(f"  full study        : {replicates / t_batch:8.1f} replicates/s "
          f"({replicates} reps in {t_batch:.2f} s)")
    return raw


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=int, default=20)
    parser.add_argument("--k", type=int, default=3)
    parser.add_argument("--n", type=int, default=100)
    parser.add_argument("--replicates", type=int, default=200)
    parser.add_argument("--draws", type=int, default=2_000_000)
    args = parser.parse_args()

    print(f"design: p={args.p}, k={args.k}, n_i={args.n}; "
          f"backends available: {', '.join(kernels.available_backends())}")

    results = {}
    for name in kernels.available_backends():
        results[name] = bench_backend(
            name, args.p, args.k, args.n, args.replicates, args.draws
        )

    if len(results) == 2:
        gap = np.max(np.abs(results["numba"] - results["numpy"]))
        print(f"\nmax |numba - numpy| over {args.replicates} raw statistics: {gap:.3e}")


if __name__ == "__main__":
    main()
