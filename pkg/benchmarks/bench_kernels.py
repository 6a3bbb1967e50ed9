"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Workloads match the runner: one LM trajectory of 10 periods at dt = T/1e4
(1e5 RK4 steps), and the 64 transfer products of one branch-tracked
determinant ratio at N_t = 1024.
"""
import argparse
import math
import timeit

import numpy as np

from lmduality import kernels
from lmduality.classical import Model, ModelParams, generator


def workloads():
    p = ModelParams()
    A = np.ascontiguousarray(generator(Model.LM, p))
    y0 = np.array([0.3, -0.2, 0.5, 0.1])
    T = 2 * math.pi / p.omega_lm
    a = np.ascontiguousarray(1.1 + 0.4 * np.cos(2 * math.pi * np.arange(1024) / 1024))
    return {
        "rk4_linear (1e5 steps)": lambda b: b.rk4_linear(A, y0, T / 1e4, 100_000),
        "link_product (64 x 1024)": lambda b: [b.link_product(a, 1 / 1024) for _ in range(64)],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    names = sorted(kernels.BACKENDS)
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'workload':28s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in workloads().items():
        best = {}
        for n in names:
            backend = kernels.BACKENDS[n]
            best[n] = min(timeit.repeat(lambda: fn(backend), number=1, repeat=args.repeat))
        row = f"{label:28s}" + "".join(f"{best[n] * 1e3:11.2f} ms" for n in names)
        if "compiled" in best:
            row += f"{best['python'] / best['compiled']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
