"""Compiled vs NumPy kernels on the workloads that dominate a section scan.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from orthoarm import _kernels_py
from orthoarm.classify import a3_threshold

try:
    from orthoarm import _kernels as compiled
except ImportError:  # extension not built
    compiled = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    a2, d2 = 1.5, 0.5
    thr = a3_threshold(1, a2, d2).threshold_low
    rng = np.random.default_rng(0)
    rho = rng.uniform(0, 3.5, 1_000_000)
    z = rng.uniform(-3.5, 3.5, 1_000_000)
    cases = {
        "count 1e6 points": lambda k: k.count_iks_points(a2, 0.9, d2, 0.0, rho, z),
        "grid, binary (full depth)": lambda k: k.max_iks_joint_grid(a2, thr - 0.01, d2, 0.0, 1024),
        "grid, quaternary (early exit)": lambda k: k.max_iks_joint_grid(a2, thr + 0.01, d2, 0.0, 1024),
    }
    print(f"{'case':32s} {'numpy [s]':>10s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases.items():
        tp = best_of(lambda: fn(_kernels_py), args.repeat)
        if compiled is None:
            print(f"{name:32s} {tp:10.4f} {'n/a':>11s}")
            continue
        tc = best_of(lambda: fn(compiled), args.repeat)
        print(f"{name:32s} {tp:10.4f} {tc:11.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
