#!/usr/bin/env python3
"""Benchmark the residual-evaluation kernels.

Compares the compiled loop kernel (numba, when available) against the
vectorized pure-numpy fallback selected by SOLITON_REDUCE_DISABLE_NUMBA.
Both paths compute identical quantities; the test suite pins their
agreement, this script measures their speed.

Usage: python benchmarks/bench_residuals.py [--points N] [--dim n]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from soliton_reduce._kernels import (
    HAVE_NUMBA,
    _batch_residuals_loops,
    batch_residuals_compiled,
    batch_residuals_numpy,
)


def make_batch(m: int, n: int, seed: int = 0):
    gen = np.random.Generator(np.random.Philox(key=seed))
    eps = np.where(gen.uniform(size=n) < 0.5, -1.0, 1.0)
    eps[0] = 1.0
    return (eps, 1.0, gen.uniform(-1, 1, n), gen.uniform(-2, 2, (m, n)),
            gen.uniform(0.5, 2, m), gen.uniform(-1, 1, m),
            gen.uniform(-1, 1, m), gen.uniform(-1, 1, m),
            gen.uniform(-1, 1, m), 0.3)


def bench(fn, args, repeat: int = 5, number: int = 20) -> float:
    return min(timeit.repeat(lambda: fn(*args), repeat=repeat,
                             number=number)) / number


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=20000)
    parser.add_argument("--dim", type=int, default=3)
    opts = parser.parse_args()

    args = make_batch(opts.points, opts.dim)
    print(f"batch: {opts.points} points, dimension {opts.dim}")

    t_numpy = bench(batch_residuals_numpy, args)
    print(f"numpy fallback:   {t_numpy * 1e3:8.3f} ms")

    t_loops = bench(_batch_residuals_loops, args, number=1)
    print(f"python loops:     {t_loops * 1e3:8.3f} ms")

    if HAVE_NUMBA:
        batch_residuals_compiled(*args)  # trigger compilation
        t_fast = bench(batch_residuals_compiled, args)
        print(f"numba compiled:   {t_fast * 1e3:8.3f} ms")
        print(f"speedup vs numpy: {t_numpy / t_fast:6.2f}x")
        ref = batch_residuals_numpy(*args)
        fast = batch_residuals_compiled(*args)
        worst = max(float(np.max(np.abs(r - c))) for r, c in zip(ref, fast))
        print(f"max |numpy - compiled|: {worst:.3e}")
    else:
        print("numba unavailable or disabled "
              "(SOLITON_REDUCE_DISABLE_NUMBA set)")


if __name__ == "__main__":
    main()
