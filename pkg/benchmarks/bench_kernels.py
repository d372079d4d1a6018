"""Benchmark the compiled kernel backend against the pure-Python fallback.

Run with:  python3 benchmarks/bench_kernels.py [--rows N] [--dim D] [--repeat R]
"""

import argparse
import time

import numpy as np

from ctxcomp.kernels import get_backend


def best_of(repeat, fn, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rows", type=int, default=512)
    ap.add_argument("--dim", type=int, default=128)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    X = rng.normal(size=(args.rows, args.dim))
    v = rng.normal(size=args.dim)
    w = rng.uniform(0.1, 1.0, size=args.rows)
    idx = np.arange(args.rows, dtype=np.int64)

    cases = [
        ("row_norms", lambda ops: ops.row_norms(X)),
        ("row_cosines", lambda ops: ops.row_cosines(X, v)),
        ("max_cosine_vs", lambda ops: ops.max_cosine_vs(X, idx, v)),
        ("weighted_rowsum", lambda ops: ops.weighted_rowsum(X, w)),
        ("mean_rows", lambda ops: ops.mean_rows(X)),
        ("pairwise_cosine_sum", lambda ops: ops.pairwise_cosine_sum(X)),
    ]

    try:
        cy = get_backend("cy")
    except ImportError:
        print("compiled backend not built; nothing to compare")
        return
    py = get_backend("py")

    print(f"rows={args.rows} dim={args.dim} best of {args.repeat}")
    print(f"{'kernel':<22}{'py (ms)':>10}{'cy (ms)':>10}{'speedup':>9}")
    for name, call in cases:
        t_py = best_of(args.repeat, call, py)
        t_cy = best_of(args.repeat, call, cy)
        print(
            f"{name:<22}{t_py * 1e3:>10.3f}{t_cy * 1e3:>10.3f}"
            f"{t_py / t_cy:>8.1f}x"
        )


if __name__ == "__main__":
    main()
