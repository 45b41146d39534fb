"""Wall-clock comparison of the numba and numpy backends.

Times single acceleration evaluations per formulation and a full square
propagation, after one warm-up call so JIT compilation is excluded.

    python3 benchmarks/bench_backends.py [--repeat 200] [--steps 20000] [--json]
"""

import argparse
import json
import math
import sys
import time

import numpy as np

from curved_nbody import Formulation, IntegratorConfig, SystemState, accelerations, convert, propagate
from curved_nbody.equilibria import square_re
from curved_nbody.kernels import available_backends


def states():
    rng = np.random.default_rng(0)
    ang = np.array([0.3, 1.9, 3.4, 5.0])
    rad = 0.6 + 0.1 * rng.uniform(size=4)
    pos = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
    base = SystemState(1.0, [1.0, 0.7, 1.2, 0.4], pos, rng.normal(scale=0.3, size=(4, 2)), Formulation.REDUCED)
    out = {f.value: convert(base, f) for f in (Formulation.REDUCED, Formulation.EXTRINSIC, Formulation.CYLINDRICAL)}
    eq_pos = np.stack([ang, -np.ones(4)], axis=1)
    out["equator"] = convert(SystemState(1.0, base.masses, eq_pos, np.zeros((4, 2)), Formulation.CYLINDRICAL),
                             Formulation.EQUATOR)
    return out


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), float(np.median(times))


def run(repeat, steps):
    rows = []
    sts = states()
    sq = square_re(1.0, 1)
    cfg = IntegratorConfig(dt=1e-4, steps=steps, record_stride=max(1, steps // 100))
    for name in available_backends():
        for form, s in sts.items():
            lo, med = best_of(lambda s=s: accelerations(s, backend=name), repeat)
            rows.append({"backend": name, "case": f"accel {form}", "best_s": lo, "median_s": med})
        lo, med = best_of(lambda: propagate(sq.state(), cfg, backend=name), 3)
        rows.append({"backend": name, "case": f"propagate square {steps} steps", "best_s": lo, "median_s": med})
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--steps", type=int, default=20_000)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    rows = run(args.repeat, args.steps)
    if args.json:
        print(json.dumps(rows, indent=2))
        return 0
    by_case = {}
    for r in rows:
        by_case.setdefault(r["case"], {})[r["backend"]] = r["best_s"]
    print(f"{'case':38s} {'numba':>12s} {'numpy':>12s} {'speedup':>9s}")
    for case, d in by_case.items():
        nb, npy = d.get("numba", math.nan), d.get("numpy", math.nan)
        print(f"{case:38s} {nb * 1e6:10.1f}us {npy * 1e6:10.1f}us {npy / nb:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
