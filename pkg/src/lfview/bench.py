"""Benchmark the hot kernels: numba vs pure-numpy, plus the per-frame path.

Usage:
    lfview-bench --size 512x512 --iters 300
    lfview-bench --json bench.json

Reports mean/p99 microseconds per call for both backends of each kernel and
for the combined map+compose frame path, which must stay far below the
33.3 ms frame budget of a 30 FPS camera.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from . import _kernels
from .anaglyph import compose_into
from .gaze import GridConfig, select_views
from .protocol import TrajectorySpec, synth_next

FRAME_BUDGET_US = 1e6 / 30.0  # one 30 FPS frame interval


def _time_calls(fn, iters: int, warmup: int = 5) -> dict:
    for _ in range(warmup):
        fn()
    samples = np.empty(iters)
    for i in range(iters):
        t0 = time.perf_counter()
        fn()
        samples[i] = time.perf_counter() - t0
    us = samples * 1e6
    return {
        "mean_us": float(us.mean()),
        "p99_us": float(np.percentile(us, 99)),
        "min_us": float(us.min()),
        "iters": iters,
    }


def bench_compose(height: int, width: int, iters: int, rng: np.random.Generator) -> dict:
    left = rng.integers(0, 256, (height, width, 3), dtype=np.uint8)
    right = rng.integers(0, 256, (height, width, 3), dtype=np.uint8)
    out = np.empty_like(left)

    results = {"numpy": _time_calls(lambda: _kernels.compose_rgb_numpy(left, right, out), iters)}
    if _kernels.HAS_NUMBA:
        _kernels.compose_rgb_numba(left, right, out)  # compile outside timing
        results["numba"] = _time_calls(
            lambda: _kernels.compose_rgb_numba(left, right, out), iters
        )
        assert np.array_equal(
            _kernels.compose_rgb_numpy(left, right, np.empty_like(left)),
            _kernels.compose_rgb_numba(left, right, np.empty_like(left)),
        ), "backend outputs diverged"
    return results


def bench_mapping(n_positions: int, iters: int, rng: np.random.Generator) -> dict:
    xs = rng.uniform(-100, 740, n_positions)
    results = {
        "numpy": _time_calls(
            lambda: _kernels.nearest_indices_numpy(xs, 320.0, -1.0, 40.0, 9), iters
        )
    }
    if _kernels.HAS_NUMBA:
        _kernels.nearest_indices_numba(xs, 320.0, -1.0, 40.0, 9)
        results["numba"] = _time_calls(
            lambda: _kernels.nearest_indices_numba(xs, 320.0, -1.0, 40.0, 9), iters
        )
        assert np.array_equal(
            _kernels.nearest_indices_numpy(xs, 320.0, -1.0, 40.0, 9),
            _kernels.nearest_indices_numba(xs, 320.0, -1.0, 40.0, 9),
        ), "backend outputs diverged"
    return results


def measure_frame_path(height: int, width: int, iters: int,
                       rows_m: int = 9, cols_n: int = 9) -> dict:
    """Time the per-frame map+compose path on the active backend.

    Views are synthetic; eye positions sweep the full frame so the selection
    actually moves across the grid.
    """
    rng = np.random.default_rng(7)
    views = rng.integers(0, 256, (rows_m, cols_n, height, width, 3), dtype=np.uint8)
    out = np.empty((height, width, 3), dtype=np.uint8)
    gcfg = GridConfig(rows_m=rows_m, cols_n=cols_n, alpha=40.0, frame_w=640, frame_h=480)
    spec = TrajectorySpec(kind="sweep-x", amplitude=300.0, period=2.0,
                          eye_separation=65.0, rate=30.0, duration=1.0)
    _kernels.warmup(height, width)

    map_us = np.empty(iters)
    compose_us = np.empty(iters)
    for i in range(iters):
        sample = synth_next(spec, i / 30.0)
        t0 = time.perf_counter()
        sel = select_views(sample, gcfg)
        t1 = time.perf_counter()
        compose_into(views[sel.left[0], sel.left[1]],
                     views[sel.right[0], sel.right[1]], out)
        t2 = time.perf_counter()
        map_us[i] = (t1 - t0) * 1e6
        compose_us[i] = (t2 - t1) * 1e6

    combined = map_us + compose_us
    return {
        "backend": _kernels.BACKEND,
        "view_size": f"{width}x{height}",
        "iters": iters,
        "map": {"mean_us": float(map_us.mean()), "p99_us": float(np.percentile(map_us, 99))},
        "compose": {"mean_us": float(compose_us.mean()),
                    "p99_us": float(np.percentile(compose_us, 99))},
        "combined": {"mean_us": float(combined.mean()),
                     "p99_us": float(np.percentile(combined, 99))},
        "frame_budget_us": FRAME_BUDGET_US,
    }


def run_bench(height: int = 512, width: int = 512, iters: int = 300) -> dict:
    rng = np.random.default_rng(11)
    return {
        "numba_available": _kernels.HAS_NUMBA,
        "active_backend": _kernels.BACKEND,
        "compose": bench_compose(height, width, iters, rng),
        "mapping_100k": bench_mapping(100_000, max(iters // 3, 20), rng),
        "frame_path": measure_frame_path(height, width, iters),
    }


def _print_kernel_table(name: str, results: dict) -> None:
    print(f"\n{name}:")
    for backend, stats in results.items():
        print(f"  {backend:6s}  mean {stats['mean_us']:10.1f} us   "
              f"p99 {stats['p99_us']:10.1f} us")
    if "numba" in results and "numpy" in results:
        speedup = results["numpy"]["mean_us"] / max(results["numba"]["mean_us"], 1e-9)
        print(f"  numba speedup over numpy: {speedup:.2f}x")


def main(argv=None) -> int:
    p = argparse.ArgumentParser(prog="lfview-bench", description=__doc__.splitlines()[0])
    p.add_argument("--size", default="512x512", help="view size WxH (default 512x512)")
    p.add_argument("--iters", type=int, default=300, help="timed iterations (default 300)")
    p.add_argument("--json", default=None, help="also write results to a JSON file")
    args = p.parse_args(argv)

    try:
        w, h = (int(v) for v in args.size.lower().split("x"))
    except ValueError:
        p.error(f"--size must look like 512x512, got {args.size!r}")

    results = run_bench(height=h, width=w, iters=args.iters)

    print(f"backend: {results['active_backend']} "
          f"(numba available: {results['numba_available']})")
    print(f"view size: {w}x{h}, iters: {args.iters}")
    _print_kernel_table("compose (anaglyph channel merge)", results["compose"])
    _print_kernel_table("nearest-index mapping (100k positions)", results["mapping_100k"])

    fp = results["frame_path"]
    print("\nper-frame map+compose path:")
    print(f"  combined mean {fp['combined']['mean_us']:10.1f} us   "
          f"p99 {fp['combined']['p99_us']:10.1f} us   "
          f"budget {fp['frame_budget_us']:.1f} us")
    ok = fp["combined"]["p99_us"] < fp["frame_budget_us"]
    print(f"  within 30 FPS frame budget: {'yes' if ok else 'NO'}")

    if args.json:
        with open(args.json, "w", encoding="utf-8") as f:
            json.dump(results, f, indent=2)
        print(f"\nresults written to {args.json}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
