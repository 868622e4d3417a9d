#!/usr/bin/env python3
"""Compare the compiled Dijkstra kernel against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 500,1000,2000] [--repeats 5]

Both kernels share one contract and are exercised on the same seeded
Barabasi-Albert graphs; the script prints per-size medians and the speedup.
"""

import argparse
import statistics
import time

import numpy as np

from pathcut._dijkstra_py import dijkstra_csr as python_kernel
from pathcut.synthgen import GeneratorParams, generate

try:
    from pathcut._speedups import dijkstra_csr as compiled_kernel
except ImportError:
    compiled_kernel = None


def time_kernel(kernel, g, sources, repeats):
    deleted = np.zeros(g.edge_count, dtype=np.uint8)
    best = []
    for source in sources:
        runs = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            kernel(g.node_count, g.indptr, g.nbr, g.eidx, g.weight, deleted, source)
            runs.append(time.perf_counter() - t0)
        best.append(min(runs))
    return statistics.median(best)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="500,1000,2000,5000")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    if compiled_kernel is None:
        print("compiled extension not built; only the fallback will run")

    print(f"{'n':>6} {'m':>7} {'python (ms)':>12} {'compiled (ms)':>14} {'speedup':>8}")
    for n in (int(s) for s in args.sizes.split(",")):
        g = generate(GeneratorParams("ba", n=n, m=7, seed=args.seed))
        sources = list(range(0, n, max(1, n // 8)))
        py = time_kernel(python_kernel, g, sources, args.repeats)
        if compiled_kernel is None:
            print(f"{n:>6} {g.edge_count:>7} {py * 1e3:>12.3f} {'-':>14} {'-':>8}")
            continue
        cy = time_kernel(compiled_kernel, g, sources, args.repeats)
        print(
            f"{n:>6} {g.edge_count:>7} {py * 1e3:>12.3f} {cy * 1e3:>14.3f} "
            f"{py / cy:>7.1f}x"
        )


if __name__ == "__main__":
    main()
