#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times boost_split_scan, gini_split_scan, and smo_pass over a range of row
counts and prints per-call medians plus the speedup ratio. The compiled
path is warmed before timing so JIT compilation is excluded.

Usage: python benchmarks/bench_kernels.py [--repeats 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from crspredict.kernels import numpy_backend

try:
    from crspredict.kernels import numba_backend
except ImportError:
    numba_backend = None

SIZES = (50, 200, 1_000, 5_000, 20_000)
SMO_SIZES = (50, 200, 524, 1_000)


def time_call(fn, args, repeats):
    best = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        fn(*args)
        best.append(time.perf_counter_ns() - t0)
    return float(np.median(best)) * 1e-9


def split_args(rng, n, mode):
    vals = np.sort(np.round(rng.normal(size=n), 3))
    if mode == "boost":
        p = rng.uniform(0.05, 0.95, n)
        y = rng.integers(0, 2, n)
        return (vals, p - y, p * (1 - p), 1.0, 0.0, 1)
    labels = rng.integers(0, 2, n).astype(np.float64)
    weights = rng.uniform(0.1, 1.0, n)
    return (vals, labels, weights, 1)


def smo_args(rng, n):
    X = rng.normal(size=(n, 4))
    y = np.where(rng.random(n) < 0.8, 1.0, -1.0)
    diff = X[:, None, :] - X[None, :, :]
    K = np.exp(-0.25 * np.sum(diff * diff, axis=2))
    K = (K + K.T) / 2.0
    partner = rng.integers(0, n - 1, size=n)
    partner = partner + (partner >= np.arange(n))
    return K, y, partner


def run_row(label, fn_np, fn_nb, args_np, args_nb, repeats):
    t_np = time_call(fn_np, args_np, repeats)
    if fn_nb is None:
        print(f"{label:>24} | {t_np * 1e6:>12.1f} | {'n/a':>12} | {'n/a':>8}")
        return
    fn_nb(*args_nb)  # warm the JIT
    t_nb = time_call(fn_nb, args_nb, repeats)
    ratio = t_np / t_nb if t_nb > 0 else float("inf")
    print(f"{label:>24} | {t_np * 1e6:>12.1f} | {t_nb * 1e6:>12.1f} | {ratio:>7.1f}x")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    print(f"{'kernel / n':>24} | {'numpy (us)':>12} | {'numba (us)':>12} | {'speedup':>8}")
    print("-" * 70)
    for n in SIZES:
        a = split_args(rng, n, "boost")
        run_row(
            f"boost_split_scan / {n}",
            numpy_backend.boost_split_scan,
            numba_backend.boost_split_scan if numba_backend else None,
            a, a, args.repeats,
        )
    for n in SIZES:
        a = split_args(rng, n, "gini")
        run_row(
            f"gini_split_scan / {n}",
            numpy_backend.gini_split_scan,
            numba_backend.gini_split_scan if numba_backend else None,
            a, a, args.repeats,
        )
    for n in SMO_SIZES:
        K, y, partner = smo_args(rng, n)
        # fresh state per call so both backends do comparable work
        def np_call(K=K, y=y, partner=partner):
            alpha = np.zeros(y.size)
            err = -y.copy()
            numpy_backend.smo_pass(K, y, alpha, err, 0.0, 1.0, 1e-3, partner)

        if numba_backend:
            def nb_call(K=K, y=y, partner=partner):
                alpha = np.zeros(y.size)
                err = -y.copy()
                numba_backend.smo_pass(K, y, alpha, err, 0.0, 1.0, 1e-3, partner)
        else:
            nb_call = None
        run_row(f"smo_pass / {n}", np_call, nb_call, (), (), max(args.repeats // 10, 5))


if __name__ == "__main__":
    main()
