"""Time the numba kernels against the pure-numpy fallback.

Both paths are called directly (no env flag needed) on the same inputs and
their results are compared before any timing is reported.

    python3 benchmarks/bench_kernels.py --repeat 3
"""

import argparse
import time

import numpy as np

from oscbound import _accel, kernels
from oscbound.corpus import sample_function
from oscbound.shapes import CUBES, RECTANGLES, basis_sides


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def cases(grid2d: int, grid1d: int, grid3d: int, seed: int):
    rng = np.random.default_rng(seed)
    f2 = sample_function("iid", 2, grid2d, rng).f
    f1 = sample_function("iid", 1, grid1d, rng).f
    f3 = sample_function("radial", 3, grid3d, rng).f
    mono = np.sort(rng.pareto(1.5, grid1d))[::-1].copy()
    yield f"scan cubes {grid2d}^2", "scan", f2.values, basis_sides(CUBES, f2.extents)
    yield f"scan rectangles {grid2d}^2", "scan", f2.values, basis_sides(RECTANGLES, f2.extents)
    yield f"scan cubes {grid3d}^3", "scan", f3.values, basis_sides(CUBES, f3.extents)
    yield f"scan intervals {grid1d}", "scan", f1.values, basis_sides(CUBES, f1.extents)
    yield f"all placements {grid2d}^2 side 8", "boxes", f2.values, (8, 8)
    yield f"monotone intervals {grid1d}", "monotone", mono, None


def run(name, kind, values, sides, repeat):
    if kind == "scan":
        c, P, P2 = kernels.centered_tables(values)
        s = kernels.sides3d(sides)
        if c.shape[1] == c.shape[2] == 1 and c.shape[0] >= kernels.SWEEP_MIN_CELLS:
            fast = lambda: kernels.scan_boxes(values, sides, use_numba=True)  # noqa: E731
        else:
            fast = lambda: kernels.scan_boxes_numba(c, P, P2, s, False)  # noqa: E731
        slow = lambda: kernels.scan_boxes_numpy(c, P, P2, s, False)  # noqa: E731
        pick = lambda r: float(np.max(r[0]))  # noqa: E731
    elif kind == "boxes":
        fast = lambda: kernels.box_oscillations(values, sides, use_numba=True)  # noqa: E731
        slow = lambda: kernels.box_oscillations(values, sides, use_numba=False)  # noqa: E731
        pick = lambda r: float(np.max(r))  # noqa: E731
    else:
        fast = lambda: kernels.monotone_interval_scan(values, use_numba=True)  # noqa: E731
        slow = lambda: kernels.monotone_interval_scan(values, use_numba=False)  # noqa: E731
        pick = lambda r: float(r[0])  # noqa: E731
    fast()  # compile outside the timing
    tn, rn = _time(fast, repeat)
    tp, rp = _time(slow, 1)
    a, b = pick(rn), pick(rp)
    agree = abs(a - b) <= 1e-12 * max(1.0, abs(b))
    return tn, tp, a, b, agree


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--grid2d", type=int, default=64)
    p.add_argument("--grid1d", type=int, default=1024)
    p.add_argument("--grid3d", type=int, default=16)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':34s} {'numba s':>9s} {'numpy s':>9s} {'speedup':>8s}  agree")
    ok = True
    for name, kind, values, sides in cases(args.grid2d, args.grid1d, args.grid3d, args.seed):
        tn, tp, a, b, agree = run(name, kind, values, sides, args.repeat)
        ok &= agree
        print(f"{name:34s} {tn:9.3f} {tp:9.3f} {tp / tn:8.1f}  {'yes' if agree else f'NO {a!r} {b!r}'}")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
