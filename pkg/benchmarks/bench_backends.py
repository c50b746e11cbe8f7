"""Timing comparison of the numba and numpy kernel backends.

Runs the same filtering workload through both backends (and optionally the
brute-force reference on a small tile for scale) and prints one row per
configuration. The first numba call per process pays JIT compilation; a
warm-up round keeps that out of the numbers.

Usage:
    python benchmarks/bench_backends.py [--sizes 256,512,1024] [--radii 2,10]
        [--repeat 3] [--with-reference]
"""

import argparse
import os
import sys
import time

import numpy as np


def _best_of(repeat, fn):
    best = float("inf")
    for _ in range(repeat):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="256,512,1024",
                        help="comma-separated square plane sizes")
    parser.add_argument("--radii", default="2,10",
                        help="comma-separated window radii")
    parser.add_argument("--epsilon", type=float, default=0.01)
    parser.add_argument("--repeat", type=int, default=3,
                        help="keep the best of this many runs")
    parser.add_argument("--with-reference", action="store_true",
                        help="also time the brute-force path on a 64x64 tile")
    args = parser.parse_args(argv)

    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    radii = [int(r) for r in args.radii.split(",") if r.strip()]

    from svf import FilterParams, filter_plane
    from svf.backend import HAS_NUMBA

    backends = ["numpy"] + (["numba"] if HAS_NUMBA else [])
    rng = np.random.default_rng(1234)
    planes = {size: rng.random((size, size)) for size in sizes}

    # warm-up: compile the numba kernels outside the timed region
    if HAS_NUMBA:
        os.environ["SVF_BACKEND"] = "numba"
        filter_plane(planes[sizes[0]][:64, :64], FilterParams(max(radii), args.epsilon))

    header = f"{'backend':<8} {'size':>6} {'radius':>6} {'best_ms':>10} {'Mpx/s':>8}"
    print(header)
    print("-" * len(header))
    rows = {}
    for name in backends:
        os.environ["SVF_BACKEND"] = name
        for size in sizes:
            plane = planes[size]
            for radius in radii:
                if 2 * radius + 1 > size:
                    continue
                params = FilterParams(radius, args.epsilon)
                best = _best_of(args.repeat, lambda: filter_plane(plane, params))
                rate = plane.size / best / 1e6
                rows[(name, size, radius)] = best
                print(f"{name:<8} {size:>6} {radius:>6} {best * 1e3:>10.2f} {rate:>8.1f}")

    for (size, radius) in [(s, r) for s in sizes for r in radii]:
        numba_t = rows.get(("numba", size, radius))
        numpy_t = rows.get(("numpy", size, radius))
        if numba_t and numpy_t:
            print(f"numba speedup over numpy at {size}x{size} r={radius}: "
                  f"{numpy_t / numba_t:.2f}x")

    if args.with_reference:
        from svf.reference import filter_plane_reference

        tile = planes[sizes[0]][:64, :64]
        for radius in radii:
            if 2 * radius + 1 > 64:
                continue
            params = FilterParams(radius, args.epsilon)
            best = _best_of(1, lambda: filter_plane_reference(tile, params))
            print(f"reference 64x64 r={radius}: {best * 1e3:.1f} ms "
                  f"({tile.size / best / 1e6:.3f} Mpx/s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
