"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""
import argparse
import json
import timeit

import numpy as np

from lanemden import _kernels_py
from lanemden.geometry import DomainSpec, build_grid

try:
    from lanemden import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    disc = build_grid(DomainSpec.disc(), 128)
    mask = disc.interior_mask.view(np.uint8)
    u = np.ascontiguousarray(np.where(mask, rng.random(mask.shape), 0.0))
    f = np.ascontiguousarray(mask, dtype=float)
    n = 20000
    sub = -np.ones(n)
    diag = 2.0 + rng.random(n)
    sup = -np.ones(n)
    rhs = rng.random(n)
    X = np.ascontiguousarray(rng.random((4000, 64)))
    w = rng.random(4000)
    return {
        "laplacian_5pt (disc, 128)": lambda m: m.laplacian_5pt(u, mask, disc.h),
        "pcg_5pt (disc, 128)": lambda m: m.pcg_5pt(f, mask, disc.h, 1e-10, 5000),
        "tridiag_solve (n=20000)": lambda m: m.tridiag_solve(sub, diag, sup, rhs),
        "column_power_sums (4000x64, q=2)": lambda m: m.column_power_sums(X, 2.0, w),
        "column_power_sums (4000x64, q=1.7)": lambda m: m.column_power_sums(X, 1.7, w),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the timings here")
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is timed")
    rows = []
    for name, fn in cases(np.random.default_rng(0)).items():
        row = {"kernel": name}
        for label, mod in (("python", _kernels_py), ("compiled", _kernels)):
            if mod is None:
                continue
            n, _ = timeit.Timer(lambda: fn(mod)).autorange()
            row[label] = min(timeit.repeat(lambda: fn(mod), number=n, repeat=args.repeat)) / n
        if "compiled" in row:
            row["speedup"] = row["python"] / row["compiled"]
        rows.append(row)
    print(f"{'kernel':38s} {'python [ms]':>12s} {'compiled [ms]':>14s} {'speedup':>8s}")
    for r in rows:
        comp = f"{1e3 * r['compiled']:14.3f}" if "compiled" in r else f"{'-':>14s}"
        sp = f"{r['speedup']:8.1f}" if "speedup" in r else f"{'-':>8s}"
        print(f"{r['kernel']:38s} {1e3 * r['python']:12.3f} {comp} {sp}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
