"""Time the JIT kernels against the pure numpy fallback on identical inputs.

Run:  python3 benchmarks/compare_backends.py [--side 256] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from bakerlab import _kernels
from bakerlab.params import make_toy


def _field_inputs(side: int):
    xs = np.linspace(-8.0, 8.0, side)
    gy, gx = np.meshgrid(xs, xs, indexing="ij")
    return gx.ravel(), gy.ravel()


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--side", type=int, default=256,
                    help="grid is side x side points")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    p = make_toy("doubling")
    zx, zy = _field_inputs(args.side)
    npts = zx.size

    backends = ["numpy"]
    if _kernels.NUMBA_ENABLED:
        _kernels.warmup()
        backends.insert(0, "numba")
    else:
        print("numba unavailable or disabled; timing numpy only")

    rows = []
    for backend in backends:
        t_h = _time(lambda: _kernels.h_field(zx, zy, p, backend=backend),
                    args.repeats)
        t_c = _time(lambda: _kernels.classify_field(
            zx, zy, p, 40, 64.0, backend=backend), args.repeats)
        rows.append((backend, t_h, t_c))

    print(f"\n{npts} points, best of {args.repeats}")
    print(f"{'backend':<8} {'h_field':>12} {'classify':>12} "
          f"{'h Mpts/s':>10} {'cls Mpts/s':>11}")
    for backend, t_h, t_c in rows:
        print(f"{backend:<8} {t_h:>11.4f}s {t_c:>11.4f}s "
              f"{npts / t_h / 1e6:>10.2f} {npts / t_c / 1e6:>11.2f}")
    if len(rows) == 2:
        print(f"\nspeedup: h_field x{rows[1][1] / rows[0][1]:.1f}, "
              f"classify x{rows[1][2] / rows[0][2]:.1f}")

    # classification must agree bitwise across backends; the raw field only
    # to a few ulps (the two backends use different libm implementations)
    if len(rows) == 2:
        s0, t0 = _kernels.classify_field(zx, zy, p, 40, 64.0,
                                         backend="numba")
        s1, t1 = _kernels.classify_field(zx, zy, p, 40, 64.0,
                                         backend="numpy")
        cls_ok = np.array_equal(s0, s1) and np.array_equal(t0, t1)
        c0, l0, a0 = _kernels.h_field(zx, zy, p, backend="numba")
        c1, l1, a1 = _kernels.h_field(zx, zy, p, backend="numpy")
        m = np.isfinite(l0) & np.isfinite(l1)
        dl = float(np.max(np.abs(l0[m] - l1[m])
                          / np.maximum(1.0, np.abs(l0[m]))))
        da = float(np.max(np.abs(a0 - a1)))
        print(f"classify bitwise identical: {cls_ok}")
        print(f"h_field gap: rel logmod {dl:.2e}, abs arg {da:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
