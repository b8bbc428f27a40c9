"""Benchmark the compiled integrator kernel against the NumPy fallback.

Usage::

    python benchmarks/bench_kernels.py [--batch 256] [--steps 20000]

Times both backends on the same workload and reports the speedup plus
the worst coordinate disagreement between them.
"""

import argparse
import time

import numpy as np

from phasemix import KERNEL_BACKEND
from phasemix._kernels import leapfrog, leapfrog_fallback


def bench(kernel, x, v, eps, dt, nsteps, repeats):
    best = float("inf")
    for _ in range(repeats):
        xs, vs = x.copy(), v.copy()
        start = time.perf_counter()
        kernel(xs, vs, eps, dt, nsteps)
        best = min(best, time.perf_counter() - start)
    return best, xs, vs


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--batch", type=int, default=256)
    parser.add_argument("--steps", type=int, default=20_000)
    parser.add_argument("--dt", type=float, default=1e-3)
    parser.add_argument("--eps", type=float, default=0.1)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    x = rng.uniform(-1.5, 1.5, args.batch)
    v = rng.uniform(-1.5, 1.5, args.batch)

    print(f"active backend: {KERNEL_BACKEND}")
    print(f"batch={args.batch}  steps={args.steps}  dt={args.dt}  eps={args.eps}")

    t_main, xm, vm = bench(leapfrog, x, v, args.eps, args.dt, args.steps, args.repeats)
    t_fall, xf, vf = bench(
        leapfrog_fallback, x, v, args.eps, args.dt, args.steps, args.repeats
    )
    gap = max(np.max(np.abs(xm - xf)), np.max(np.abs(vm - vf)))

    print(f"selected kernel : {t_main * 1e3:9.3f} ms")
    print(f"numpy fallback  : {t_fall * 1e3:9.3f} ms")
    if KERNEL_BACKEND == "compiled":
        print(f"speedup         : {t_fall / t_main:9.2f}x")
    print(f"max |difference|: {gap:.3e}")


if __name__ == "__main__":
    main()
