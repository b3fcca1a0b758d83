#!/usr/bin/env python3
"""Benchmark the numba conv2d kernels against the pure-numpy fallback.

Runs forward, backward-input, and backward-kernel passes at a few
representative problem sizes and prints a timing table with speedups.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from transkit import kernels
from transkit.kernels import numpy_backend

# (label, (H, W, C_in), (KH, KW, C_in, C_out))
CASES = [
    ("small  88x64x1    8f 3x3", (88, 64, 1), (3, 3, 1, 8)),
    ("medium 352x128x8  8f 3x3", (352, 128, 8), (3, 3, 8, 8)),
    ("wide   88x256x8  16f 5x5", (88, 256, 8), (5, 5, 8, 16)),
]


def _time(fn, repeats):
    fn()  # warm-up (JIT compile for the numba backend)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    if not kernels.USE_NUMBA:
        print("numba backend unavailable or disabled (TRANSKIT_NO_NUMBA set);")
        print("timing the numpy backend against itself.")
    numba_be = kernels

    header = f"{'case':28s} {'pass':16s} {'numpy (ms)':>11s} {'numba (ms)':>11s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))

    rng = np.random.default_rng(0)
    for label, x_shape, w_shape in CASES:
        x = rng.standard_normal(x_shape)
        w = rng.standard_normal(w_shape)
        b = rng.standard_normal(w_shape[3])
        y = numpy_backend.conv2d_forward(x, w, b)
        dy = rng.standard_normal(y.shape)

        passes = [
            ("forward",
             lambda be: be.conv2d_forward(x, w, b)),
            ("backward_input",
             lambda be: be.conv2d_backward_input(dy, w, x.shape)),
            ("backward_kernel",
             lambda be: be.conv2d_backward_kernel(x, dy, w_shape[0], w_shape[1])),
        ]
        for name, run in passes:
            t_np = _time(lambda: run(numpy_backend), args.repeats)
            t_nb = _time(lambda: run(numba_be), args.repeats)
            print(f"{label:28s} {name:16s} {t_np * 1e3:11.2f} {t_nb * 1e3:11.2f} {t_np / t_nb:7.1f}x")

        # Correctness cross-check while we're here.
        ref = numpy_backend.conv2d_forward(x, w, b)
        got = numba_be.conv2d_forward(x, w, b)
        assert np.allclose(ref, got, rtol=1e-10, atol=1e-10), label


if __name__ == "__main__":
    main()
