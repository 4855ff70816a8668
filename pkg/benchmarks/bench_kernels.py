"""Benchmark the compiled geometry kernels against the pure-numpy fallback.

Run:  python3 benchmarks/bench_kernels.py [--repeats N]

Both implementations are imported side by side (no env flag needed here;
set GRASPGEN_NO_NUMBA=1 to make the package itself use the fallback).
"""

import argparse
import math
import time

import numpy as np

from graspgen.core.geometry import ImageGrasp, image_grasp_to_rect
from graspgen.kernels import numpy_impl

try:
    from graspgen.kernels import numba_impl
except ImportError:
    numba_impl = None


def random_rects(n, rng, h=224, w=224):
    rects = []
    for _ in range(n):
        g = ImageGrasp(
            center=(rng.uniform(40, h - 40), rng.uniform(40, w - 40)),
            angle=rng.uniform(-math.pi / 2, math.pi / 2),
            width=rng.uniform(20, 120),
        )
        rects.append(image_grasp_to_rect(g, jaw_height=rng.uniform(10, 50)))
    return rects


def time_fn(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--pairs", type=int, default=300)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rects = random_rects(2 * args.pairs, rng)
    pairs = [(rects[2 * i].vertices, rects[2 * i + 1].vertices)
             for i in range(args.pairs)]
    masks_args = [r.vertices for r in rects[: args.pairs]]

    depth = rng.uniform(0.5, 1.2, (480, 640))
    valid = rng.random((480, 640)) > 0.05

    jobs = {
        "quad_pair_counts x%d" % args.pairs: lambda impl: [
            impl.quad_pair_counts(a, b) for a, b in pairs
        ],
        "quad_mask x%d" % args.pairs: lambda impl: [
            impl.quad_mask(v, 224, 224) for v in masks_args
        ],
        "fill_missing 480x640": lambda impl: impl.fill_missing(depth, valid),
    }

    impls = {"numpy": numpy_impl}
    if numba_impl is not None:
        for job in jobs.values():
            job(numba_impl)  # warm the JIT outside the timed region
        impls["numba"] = numba_impl
    else:
        print("numba unavailable; benchmarking the fallback only")

    width = max(len(k) for k in jobs)
    print(f"{'kernel'.ljust(width)}  " + "".join(f"{n:>12}" for n in impls) +
          ("     speedup" if len(impls) == 2 else ""))
    for name, job in jobs.items():
        times = {n: time_fn(lambda impl=impl: job(impl), args.repeats)
                 for n, impl in impls.items()}
        row = f"{name.ljust(width)}  " + "".join(
            f"{times[n] * 1e3:>10.2f}ms" for n in impls
        )
        if len(times) == 2:
            row += f"  {times['numpy'] / times['numba']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
