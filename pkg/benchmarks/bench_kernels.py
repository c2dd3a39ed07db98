#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback lane.

Usage: python benchmarks/bench_kernels.py [--n 32 128 512] [--steps 20000]
"""

import argparse
import time

import numpy as np

from riesz_lab import _purepy

try:
    from riesz_lab import _core
except ImportError:
    _core = None


def _time(fn, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pair(lane, pts):
    return _time(lambda: lane.pair_energy(pts, 0.0, True))


def bench_grad(lane, pts):
    return _time(lambda: lane.pair_gradient(pts, 0.0, True))


def bench_chain(lane, pts, steps):
    rng = np.random.default_rng(0)
    n = pts.shape[0]
    sites = rng.integers(0, n, size=steps)
    normals = rng.standard_normal((steps, pts.shape[1]))
    uniforms = rng.random(steps)
    e0 = lane.total_energy(pts, 0.0, True, 0.5)

    def run():
        lane.mh_block(pts.copy(), 0.0, True, 0.5, 2.0, 0.1,
                      sites, normals, uniforms, e0)

    return _time(run, repeat=3)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, nargs="+", default=[32, 128, 512])
    parser.add_argument("--steps", type=int, default=20000)
    args = parser.parse_args()

    if _core is None:
        print("compiled extension unavailable; showing the pure lane only")
    rng = np.random.default_rng(1)
    header = f"{'kernel':<22}{'n':>6}{'pure (ms)':>12}"
    if _core is not None:
        header += f"{'compiled (ms)':>15}{'speedup':>9}"
    print(header)
    for n in args.n:
        pts = rng.normal(size=(n, 1))
        for name, bench in (("pair_energy", bench_pair),
                            ("pair_gradient", bench_grad),
                            (f"mh_block[{args.steps}]",
                             lambda lane, p: bench_chain(lane, p, args.steps))):
            t_pure = bench(_purepy, pts)
            row = f"{name:<22}{n:>6}{t_pure * 1e3:>12.2f}"
            if _core is not None:
                t_core = bench(_core, pts)
                row += f"{t_core * 1e3:>15.2f}{t_pure / t_core:>9.1f}"
            print(row)


if __name__ == "__main__":
    main()
