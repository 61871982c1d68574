"""Compare the compiled extension against the numpy fallback.

Runs the two hot loops (kernel grid fill, barycentric rim evaluation) through
both backends, checks that they agree, and times a full solve-and-map pass
with the dispatcher pinned to each side.

Usage: python3 bench/benchmark.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from acutemap import DiskMap, TrigBoundary, solve_correspondence
from acutemap import _backend

TWO_PI = 2.0 * np.pi
CURVE = TrigBoundary({1: 1.0, -2: 0.25, -3: 0.125j})


def best_of(repeats, fn, *args):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def row(label, t_np, t_ext, agree):
    if t_ext is None:
        print(f"  {label:<18} numpy {t_np * 1e3:9.2f} ms   (no extension)")
        return
    ratio = t_np / t_ext
    print(
        f"  {label:<18} numpy {t_np * 1e3:9.2f} ms   extension "
        f"{t_ext * 1e3:9.2f} ms   {ratio:5.1f}x   agree {agree:.1e}"
    )


def bench_kernel_fill(repeats):
    print("kernel grid fill (N x N angle and log kernels)")
    for size in (256, 512, 1024, 2048):
        t = TWO_PI * np.arange(size) / size
        args = (CURVE(t), CURVE.derivative(t), CURVE.derivative(t, 2), t)
        t_np = best_of(repeats, _backend.fill_kernel_grids_numpy, *args)
        if not _backend.HAVE_EXTENSION:
            row(f"N={size}", t_np, None, 0.0)
            continue
        t_ext = best_of(repeats, _backend._speedups.fill_kernel_grids, *args)
        ka, la = _backend.fill_kernel_grids_numpy(*args)
        kb, lb = _backend._speedups.fill_kernel_grids(*args)
        agree = max(np.max(np.abs(ka - kb)), np.max(np.abs(la - lb)))
        row(f"N={size}", t_np, t_ext, agree)


def bench_cauchy_pair(repeats):
    print("barycentric rim evaluation (paired Cauchy sums)")
    rng = np.random.default_rng(7)
    for nodes, points in ((1024, 512), (2048, 2048), (8192, 4096)):
        unit = np.exp(1j * TWO_PI * np.arange(nodes) / nodes)
        ampn = rng.normal(size=nodes) + 1j * rng.normal(size=nodes)
        ampd = rng.normal(size=nodes) + 1j * rng.normal(size=nodes)
        zetas = 0.95 * np.exp(1j * rng.uniform(0.0, TWO_PI, points))
        zetas *= rng.uniform(0.2, 1.0, points)
        args = (ampn, ampd, unit, zetas)
        t_np = best_of(repeats, _backend.eval_cauchy_pair_numpy, *args)
        if not _backend.HAVE_EXTENSION:
            row(f"{nodes}x{points}", t_np, None, 0.0)
            continue
        t_ext = best_of(repeats, _backend._speedups.eval_cauchy_pair, *args)
        na, da = _backend.eval_cauchy_pair_numpy(*args)
        nb, db = _backend._speedups.eval_cauchy_pair(*args)
        agree = max(np.max(np.abs(na - nb)), np.max(np.abs(da - db)))
        row(f"{nodes}x{points}", t_np, t_ext, agree)


def solve_and_map():
    raw = solve_correspondence(CURVE, 64, 1024)
    disk = DiskMap(raw, nq=1024)
    angles = TWO_PI * np.arange(2048) / 2048
    disk.map_points(0.99 * np.exp(1j * angles))


def bench_end_to_end(repeats):
    print("full pass (solve M=64 N=1024, then 2048 rim points at |zeta|=0.99)")
    saved = _backend.USE_EXTENSION
    try:
        _backend.USE_EXTENSION = False
        t_np = best_of(repeats, solve_and_map)
        if not _backend.HAVE_EXTENSION:
            row("solve+map", t_np, None, 0.0)
            return
        _backend.USE_EXTENSION = True
        t_ext = best_of(repeats, solve_and_map)
    finally:
        _backend.USE_EXTENSION = saved
    row("solve+map", t_np, t_ext, 0.0)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="best-of count")
    args = parser.parse_args()
    which = "extension" if _backend.USE_EXTENSION else "numpy fallback"
    print(f"active backend at import: {which}")
    bench_kernel_fill(args.repeats)
    bench_cauchy_pair(args.repeats)
    bench_end_to_end(args.repeats)


if __name__ == "__main__":
    main()
