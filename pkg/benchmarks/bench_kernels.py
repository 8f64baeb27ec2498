"""Compare the compiled and numpy kernel backends on batch residual evaluation.

Usage: python benchmarks/bench_kernels.py [--points 20000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from canext import kernels
from canext.monodromy import model_from_logs, sample_sheet
from canext.exact import Matrix
from canext.sheet import present_sheet, sample_parameters


def jordan(d):
    return Matrix([[int(j == i + 1) for j in range(d)] for i in range(d)])


def instance():
    J = jordan(5)
    model = model_from_logs([J, J @ J, J @ J @ J, -J - J @ J - J @ J @ J])
    return model, (0, 0, 0, 1, 2)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=20000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    model, h = instance()
    pres = present_sheet(model, h)
    zs = sample_parameters(model.n, min(args.points, 2000), seed=0)
    pts = [sample_sheet(model, h, z) for z in zs]
    reps = -(-args.points // len(pts))
    t = np.tile(np.array([p.t for p in pts]), (reps, 1))[: args.points]
    v = np.tile(np.array([p.v for p in pts]), (reps, 1))[: args.points]

    print(f"instance: n={model.n} d={model.d} k={pres.k}, {len(pres.eqA)} eqA, {len(pres.eqB)} eqB")
    print(f"points: {args.points}, best of {args.repeat}")
    results = {}
    for name in sorted(kernels.backends()):
        results[name] = best_of(lambda: pres.residuals(t, v, name), args.repeat)
        print(f"  {name:7s} {results[name] * 1e3:9.2f} ms")
    if len(results) == 2:
        ra = pres.residuals(t, v, "cython")
        rb = pres.residuals(t, v, "python")
        diff = max(float(np.abs(x - y).max(initial=0)) for x, y in zip(ra, rb))
        print(f"  speedup {results['python'] / results['cython']:.1f}x, max backend difference {diff:.1e}")
    else:
        print("  compiled extension not available; only the fallback was timed")


if __name__ == "__main__":
    main()
