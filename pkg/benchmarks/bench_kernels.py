#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Imports both implementations directly (bypassing PARAFLOW_BACKEND) and
times each hot kernel on identical inputs after a warmup call, printing
per-kernel seconds and the speedup ratio.

Usage:
    python benchmarks/bench_kernels.py [--n 50000] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from paraflow._kernels import numpy_impl

try:
    from paraflow._kernels import numba_impl
except ImportError:
    numba_impl = None


def timed(fn, *args, repeats=3):
    fn(*args)  # warmup / JIT
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_rolling(impl, n, rng):
    x = np.ascontiguousarray(rng.standard_normal(n))
    return timed(impl.rolling_core, x, 50)


def bench_forest(impl, n, rng):
    x = np.ascontiguousarray(rng.standard_normal((n, 8)))
    height_limit = 8
    max_nodes = 2 ** (height_limit + 1) + 1
    n_trees = 50
    feats = np.full((n_trees, max_nodes), -1, dtype=np.int64)
    thrs = np.zeros((n_trees, max_nodes))
    lefts = np.full((n_trees, max_nodes), -1, dtype=np.int64)
    rights = np.full((n_trees, max_nodes), -1, dtype=np.int64)
    sizes = np.zeros((n_trees, max_nodes), dtype=np.int64)
    build_rng = np.random.default_rng(7)
    for t in range(n_trees):
        rows = build_rng.choice(n, size=min(256, n), replace=False)
        uniforms = build_rng.random(2 * max_nodes)
        impl.build_tree(x[rows], uniforms, height_limit,
                        feats[t], thrs[t], lefts[t], rights[t], sizes[t])
    c_table = np.zeros(257)
    harmonic = 0.0
    for m in range(2, 257):
        harmonic += 1.0 / (m - 1)
        c_table[m] = 2.0 * harmonic - 2.0 * (m - 1) / m
    return timed(impl.forest_path_sums, x, feats, thrs, lefts, rights,
                 sizes, c_table)


def bench_smo(impl, n, rng):
    n = min(n, 2000)
    x = rng.standard_normal((n, 6))
    sq = np.einsum("ij,ij->i", x, x)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x @ x.T), 0.0)
    kernel = np.ascontiguousarray(np.exp(-d2 / 6.0))
    c_box = 1.0 / (0.1 * n)

    def solve():
        alpha = np.zeros(n)
        k0 = int(0.1 * n)
        alpha[:k0] = c_box
        alpha[k0] = 1.0 - k0 * c_box
        grad = kernel @ alpha
        impl.smo_solve(kernel, alpha, grad, c_box, 1e-3, 10**7)

    return timed(solve)


def bench_kmeans(impl, n, rng):
    x = np.ascontiguousarray(rng.standard_normal((n, 10)))
    centroids = np.ascontiguousarray(rng.standard_normal((8, 10)))

    def step():
        labels, _ = impl.kmeans_assign(x, centroids)
        impl.kmeans_update(x, labels, 8)

    return timed(step)


def bench_silhouette(impl, n, rng):
    n = min(n, 3000)
    pts = np.ascontiguousarray(rng.standard_normal((n, 10)))
    asg = rng.integers(0, 2, n)
    return timed(impl.cluster_dist_sums, pts, asg, 2)


BENCHES = [
    ("rolling_core", bench_rolling),
    ("forest_path_sums", bench_forest),
    ("smo_solve", bench_smo),
    ("kmeans_step", bench_kmeans),
    ("cluster_dist_sums", bench_silhouette),
]


def main() -> None:
    parser = argparse.ArgumentParser(description="Compare kernel backends")
    parser.add_argument("--n", type=int, default=50_000,
                        help="row count for the row-scaled kernels")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    print(f"rows={args.n} repeats={args.repeats}")
    header = f"{'kernel':<20} {'numpy (s)':>12} {'numba (s)':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, bench in BENCHES:
        rng = np.random.default_rng(42)
        t_np = bench(numpy_impl, args.n, rng)
        if numba_impl is None:
            print(f"{name:<20} {t_np:>12.4f} {'n/a':>12} {'n/a':>9}")
            continue
        rng = np.random.default_rng(42)
        t_nb = bench(numba_impl, args.n, rng)
        print(f"{name:<20} {t_np:>12.4f} {t_nb:>12.4f} {t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
