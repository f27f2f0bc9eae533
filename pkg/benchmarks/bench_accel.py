#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each hot kernel on growing problem sizes and prints a timing table.
Run without CARRIERSCHED_NO_NUMBA so both paths are importable; with the
flag set only the fallback column is populated.
"""

import argparse
import time

import numpy as np

from carriersched import accel
from carriersched.generate import GeneratorConfig, generate_instance
from carriersched.heuristic import _host_tag_csr


def timeit(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def geometric_instance(n, t, seed=0):
    radius = 0.7 if n <= 50 else max(0.07, 2.2 * np.sqrt(np.log(n) / n))
    config = GeneratorConfig(node_range=(n, n), tag_range=(t, t),
                             model_param=radius, seed=seed)
    return generate_instance(config)


def bench_jacobi(sizes):
    print("\ncyclic Jacobi eigenvalues (symmetric normalized Laplacian)")
    print(f"{'N':>6} {'numba [s]':>12} {'numpy [s]':>12} {'speedup':>9}")
    for n in sizes:
        inst = geometric_instance(n, 1, seed=n)
        a = inst.topology.adjacency_matrix()
        deg = a.sum(axis=1)
        inv = 1.0 / np.sqrt(np.maximum(deg, 1e-300))
        lap = np.eye(n) - inv[:, None] * a * inv[None, :]
        lap = (lap + lap.T) / 2
        # the kernels diagonalize in place; hand each run a fresh copy
        t_np, (vals_np, _) = timeit(
            lambda: accel._jacobi_eigvals_numpy(lap.copy(), 1e-10, 100))
        if accel._jacobi_eigvals_jit is not None:
            t_nb, (vals_nb, _) = timeit(
                lambda: accel._jacobi_eigvals_jit(lap.copy(), 1e-10, 100))
            assert np.allclose(np.sort(vals_nb), np.sort(vals_np), atol=1e-8)
            print(f"{n:>6} {t_nb:>12.4f} {t_np:>12.4f} {t_np / t_nb:>8.1f}x")
        else:
            print(f"{n:>6} {'-':>12} {t_np:>12.4f} {'-':>9}")


def bench_partition_dp(sizes):
    print("\nsubset-partition DP (exact solver inner loop)")
    print(f"{'T':>6} {'numba [s]':>12} {'python [s]':>12} {'speedup':>9}")
    rng = np.random.default_rng(0)
    for t in sizes:
        gcost = rng.integers(1, 60, size=1 << t).astype(np.float64)
        gcost[0] = np.inf
        t_py, dp_py = timeit(accel._partition_dp_loops, gcost, repeats=1)
        if accel._partition_dp_jit is not None:
            t_nb, dp_nb = timeit(accel._partition_dp_jit, gcost)
            assert np.array_equal(dp_py, dp_nb)
            print(f"{t:>6} {t_nb:>12.4f} {t_py:>12.4f} {t_py / t_nb:>8.1f}x")
        else:
            print(f"{t:>6} {'-':>12} {t_py:>12.4f} {'-':>9}")


def bench_greedy(sizes):
    print("\ngreedy carrier selection (heuristic scheduler)")
    print(f"{'N':>6} {'T':>6} {'numba [s]':>12} {'numpy [s]':>12} {'speedup':>9}")
    for n, t in sizes:
        inst = geometric_instance(n, t, seed=n + t)
        indptr, indices = inst.topology.adjacency_csr()
        tag_host = np.array([h for _, h in inst.tags], dtype=np.int64)
        start, order = _host_tag_csr(inst)
        args = (indptr, indices, tag_host, start, order)
        t_np, out_np = timeit(accel._greedy_schedule_numpy, *args, repeats=1)
        if accel._greedy_schedule_jit is not None:
            t_nb, out_nb = timeit(accel._greedy_schedule_jit, *args)
            assert all(np.array_equal(a, b) for a, b in zip(out_np, out_nb))
            print(f"{n:>6} {t:>6} {t_nb:>12.4f} {t_np:>12.4f} "
                  f"{t_np / t_nb:>8.1f}x")
        else:
            print(f"{n:>6} {t:>6} {'-':>12} {t_np:>12.4f} {'-':>9}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="smaller sizes for a fast sanity run")
    args = parser.parse_args()
    if args.quick:
        jacobi_sizes = [50, 150]
        dp_sizes = [10, 14]
        greedy_sizes = [(200, 300), (500, 750)]
    else:
        jacobi_sizes = [50, 150, 400, 800]
        dp_sizes = [10, 14, 16]
        greedy_sizes = [(200, 300), (500, 750), (1000, 1500)]
    print(f"numba path active: {accel.NUMBA_ACTIVE}")
    bench_jacobi(jacobi_sizes)
    bench_partition_dp(dp_sizes)
    bench_greedy(greedy_sizes)


if __name__ == "__main__":
    main()
