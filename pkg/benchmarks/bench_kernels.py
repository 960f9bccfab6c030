#!/usr/bin/env python3
"""Benchmark the compiled GF(p) rank kernels against the pure-numpy fallback.

The batched rank over small matrices is the hot loop of every exhaustive
enumeration (weight spectra, partial-scatteredness sweeps, rank-weight
distributions), so this is the number that decides whether the compiled
extension is worth building on a given host.

Run:  python benchmarks/bench_kernels.py [--sizes small|large]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fatlin import kernels
from fatlin.kernels import pure

WORKLOADS = {
    "small": [
        ("GF(3) 6x6  x 100k", 3, (100_000, 6, 6)),
        ("GF(3) 12x12 x 20k", 3, (20_000, 12, 12)),
        ("GF(5) 6x12 x 50k", 5, (50_000, 6, 12)),
        ("GF(2) 8x8  x 100k", 2, (100_000, 8, 8)),
    ],
    "large": [
        ("GF(3) 6x6  x 531k (code distribution)", 3, (531_441, 6, 6)),
        ("GF(3) 15x18 x 50k (k=3 spectra)", 3, (50_000, 15, 18)),
    ],
}


def bench(fn, mats, p, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(mats, p)
        best = min(best, time.perf_counter() - t0)
    return best, result


def single_rank_bench(p=3, shape=(9, 14), count=20_000):
    rng = np.random.default_rng(0)
    mats = rng.integers(0, p, size=(count,) + shape)
    t0 = time.perf_counter()
    for m in mats:
        kernels.rank_fp(m, p)
    sel = time.perf_counter() - t0
    t0 = time.perf_counter()
    for m in mats:
        pure.rank_fp(m, p)
    ref = time.perf_counter() - t0
    return sel, ref


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", choices=("small", "large", "all"), default="small")
    args = ap.parse_args()
    names = ["small", "large"] if args.sizes == "all" else [args.sizes]

    print(f"selected implementation: {kernels.implementation()}")
    if not kernels.HAVE_COMPILED:
        print("(compiled extension not built; comparing pure against itself)")
    print()
    header = f"{'workload':42s} {'selected':>10s} {'pure':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name in names:
        for label, p, shape in WORKLOADS[name]:
            rng = np.random.default_rng(42)
            mats = rng.integers(0, p, size=shape)
            t_sel, r_sel = bench(kernels.batched_rank_fp, mats, p)
            t_pure, r_pure = bench(pure.batched_rank_fp, mats, p)
            if not np.array_equal(r_sel, r_pure):
                raise SystemExit(f"MISMATCH on {label}")
            print(f"{label:42s} {t_sel:9.3f}s {t_pure:9.3f}s "
                  f"{t_pure / t_sel:7.1f}x")
    t_sel, t_pure = single_rank_bench()
    print(f"{'single rank_fp 9x14 GF(3) x 20k':42s} {t_sel:9.3f}s "
          f"{t_pure:9.3f}s {t_pure / t_sel:7.1f}x")
    print("\nresults agree between implementations on every workload")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
