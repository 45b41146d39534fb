"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a single ``PASS``/``FAIL`` line naming the criterion and
the measured quantities, then asserts. Run alone with
``pytest tests/test_acceptance.py -v -s`` or ``python3 tests/test_acceptance.py``.
"""

import json
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
from helpers import close, extrinsic_to_cylindrical_accel, lifted, random_reduced_state

from curved_nbody import (
    Formulation,
    IntegratorConfig,
    SystemState,
    accel_cylindrical,
    accel_equator,
    accel_extrinsic,
    accel_reduced,
    convert,
    distance_drift,
    propagate,
)
from curved_nbody import equilibria as eq
from curved_nbody import polyroot as pr


class Criterion:
    """Collects named checks; prints one verdict line and fails if any check failed."""

    def __init__(self, capsys, number, title):
        self.capsys = capsys
        self.number = number
        self.title = title
        self.checks = []
        self.t0 = time.perf_counter()

    def check(self, label, ok, detail=""):
        self.checks.append((label, bool(ok), detail))
        return ok

    def finish(self):
        wall = time.perf_counter() - self.t0
        ok = all(c[1] for c in self.checks)
        parts = "; ".join(f"{lab}={'ok' if good else 'NO'}{' (' + d + ')' if d else ''}"
                          for lab, good, d in self.checks)
        line = f"{'PASS' if ok else 'FAIL'} criterion {self.number} [{self.title}] {wall:.2f}s :: {parts}"
        with self.capsys.disabled():
            print("\n" + line)
        assert ok, line


def cli(*argv):
    t0 = time.perf_counter()
    r = subprocess.run([sys.executable, "-m", "curved_nbody", *argv], capture_output=True, text=True)
    return r.returncode, json.loads(r.stdout) if r.stdout else None, time.perf_counter() - t0


def test_criterion_01_polynomial_golden_values(capsys):
    c = Criterion(capsys, 1, "polynomial golden values")
    code0, out0, t0 = cli("poly", "eval", "--kappa", "1", "--x", "0")
    c.check("Q(0)=649", code0 == 0 and Fraction(out0["exact"]) == 649, out0["exact"])
    code1, out1, t1 = cli("poly", "eval", "--kappa", "1", "--x", "1/2")
    dec = float(out1["decimal"])
    c.check("Q(1/2) in [-2.4961,-2.4957]", code1 == 0 and -2.4961 <= dec <= -2.4957, out1["decimal"])
    c.check("exact path", Fraction(out1["exact"]) == pr.eval_exact(pr.q_coefficients(1), Fraction(1, 2)),
            out1["exact"])
    c.check("runtime<1s", max(t0, t1) < 1.0, f"{max(t0, t1):.3f}s per call incl. interpreter start")
    c.finish()


def test_criterion_02_descartes_counts(capsys):
    c = Criterion(capsys, 2, "Descartes counts")
    t0 = time.perf_counter()
    v_pos = pr.descartes_sign_changes(pr.q_coefficients(1))
    v_neg = pr.descartes_sign_changes(pr.q_coefficients(-1))
    wall = time.perf_counter() - t0
    c.check("kappa=1 -> 12", v_pos == 12, str(v_pos))
    c.check("kappa=-1 -> 0", v_neg == 0, str(v_neg))
    c.check("runtime<1s", wall < 1.0, f"{wall:.4f}s")
    c.finish()


def test_criterion_03_root_dichotomy(capsys):
    c = Criterion(capsys, 3, "root dichotomy")
    t0 = time.perf_counter()
    pos = pr.isolate_roots(pr.q_coefficients(1), 0, Fraction(1, 2), 40)
    neg = pr.isolate_roots(pr.q_coefficients(-1), 0, 10**6, 40)
    wall = time.perf_counter() - t0
    inside = all(0 < iv.lo < iv.hi < Fraction(1, 2) for iv in pos)
    c.check("kappa=1 >=1 interval in (0,1/2)", len(pos) >= 1 and inside,
            ", ".join(f"[{float(iv.lo):.12f},{float(iv.hi):.12f}]" for iv in pos))
    c.check("kappa=-1 none in (0,1e6)", neg == [], str(len(neg)))
    c.check("runtime<5s", wall < 5.0, f"{wall:.3f}s")
    c.finish()


def test_criterion_04_square_existence_and_value(capsys):
    c = Criterion(capsys, 4, "square RE existence and value")
    sq = eq.square_re(1.0, Fraction(1))
    c.check("exists at kappa=1", sq is not None)
    c.check("r=sqrt(2/3) to 1e-12", abs(sq.radius - math.sqrt(2 / 3)) < 1e-12, f"{sq.radius!r}")
    a1, a2 = eq.square_alpha_consistency(1.0, sq.radius, 1)
    c.check("alpha^2 formulas agree to 1e-12", abs(a1 - a2) < 1e-12, f"{a1!r} vs {a2!r}")
    # independent closed form at 3 kappa r^2 = 2, unit masses
    oracle = 4.5**1.5 / 4
    c.check("alpha^2 closed form", abs(a1 - oracle) < 1e-12, f"{oracle!r}")
    c.check("kappa=-1 nonexistence", eq.square_re(1.0, -1) is None)
    c.finish()


def test_criterion_05_square_propagation(capsys):
    c = Criterion(capsys, 5, "square RE propagation")
    t0 = time.perf_counter()
    sq = eq.square_re(1.0, 1)
    n = math.ceil(2 * sq.period / 1e-4)
    cfg = IntegratorConfig(dt=1e-4, steps=n, record_stride=100)
    traj = propagate(sq.state(), cfg, formulation=Formulation.REDUCED)
    drift, res = distance_drift(traj), max(traj.residuals)
    c.check("two periods", traj.times[-1] >= 2 * sq.period, f"t={traj.times[-1]:.6f}")
    c.check("drift<1e-6", drift < 1e-6, f"{drift:.3e}")
    c.check("residual<1e-8", res < 1e-8, f"{res:.3e}")
    bad = eq.square_re(1.0, 1, radius_scale=1.01)
    drift_bad = distance_drift(propagate(bad.state(), cfg))
    c.check("1% perturbed drift>1e-3", drift_bad > 1e-3, f"{drift_bad:.3e}")
    wall = time.perf_counter() - t0
    c.check("runtime<60s", wall < 60, f"{wall:.2f}s")
    c.finish()


def equatorial_state(rng, kappa):
    while True:
        ang = rng.uniform(0, 2 * math.pi, 4)
        diffs = ang[:, None] - ang[None, :]
        if np.all(np.abs(np.sin(diffs[np.triu_indices(4, 1)])) > 0.2):
            break
    m = rng.uniform(0.2, 1.5, 4)
    w = -1 / math.sqrt(kappa)
    pos = np.stack([ang, np.full(4, w)], axis=1)
    vel = np.stack([rng.normal(size=4), np.zeros(4)], axis=1)
    return SystemState(kappa, m, pos, vel, Formulation.CYLINDRICAL)


def test_criterion_06_formulation_consistency(capsys, rng):
    c = Criterion(capsys, 6, "formulation consistency")
    for k in (0.5, -0.5):
        worst_er, worst_cy = 0.0, 0.0
        for _ in range(100):
            s = random_reduced_state(rng, k)
            p, v = lifted(s)
            ext = SystemState(s.curvature, s.masses, p, v, Formulation.EXTRINSIC)
            a_ext = accel_extrinsic(ext)
            worst_er = max(worst_er, close(accel_reduced(s), a_ext[:, :2]))
            if k > 0:
                want = extrinsic_to_cylindrical_accel(p, v, a_ext)
                worst_cy = max(worst_cy, close(accel_cylindrical(convert(ext, "cylindrical")), want))
        c.check(f"kappa={k} extrinsic~reduced<1e-10", worst_er < 1e-10, f"{worst_er:.2e}")
        if k > 0:
            c.check(f"kappa={k} extrinsic~cylindrical<1e-10", worst_cy < 1e-10, f"{worst_cy:.2e}")
    worst_eq = 0.0
    for _ in range(100):
        s = equatorial_state(rng, 0.5)
        a = accel_cylindrical(s)
        want = np.stack([accel_equator(s.positions[:, 0], s.masses, 0.5), np.zeros(4)], axis=1)
        worst_eq = max(worst_eq, close(a, want))
    c.check("equator~cylindrical<1e-12", worst_eq < 1e-12, f"{worst_eq:.2e}")
    c.finish()


def test_criterion_07_newtonian_limit(capsys, rng):
    c = Criterion(capsys, 7, "Newtonian limit")
    worst = 0.0
    for _ in range(100):
        s = random_reduced_state(rng, 0.0, spread=1.0, vscale=1.0)
        a0 = accel_reduced(s)
        for k in (1e-8, -1e-8):
            worst = max(worst, float(np.max(np.abs(accel_reduced(s.replace(curvature=k)) - a0))))
    c.check("|a(+-1e-8)-a(0)|<1e-6", worst < 1e-6, f"{worst:.2e}")
    # equal masses m at separation d on a circle: each body has speed sqrt(m / (2 d))
    m, d = 1.0, 1.0
    v = math.sqrt(m / (2 * d))
    omega = 2 * v / d
    period = 2 * math.pi / omega
    n = 20_000
    s = SystemState(0.0, [m, m], [[d / 2, 0], [-d / 2, 0]], [[0, v], [0, -v]], Formulation.REDUCED)
    traj = propagate(s, IntegratorConfig(dt=period / n, steps=n, record_stride=100))
    err = 0.0
    for t, p in zip(traj.times, traj.positions):
        ph = omega * t
        want = 0.5 * d * np.array([[math.cos(ph), math.sin(ph)], [-math.cos(ph), -math.sin(ph)]])
        err = max(err, float(np.max(np.abs(p - want))))
    c.check("kappa=0 circular orbit over one period<1e-6", err < 1e-6, f"{err:.2e}")
    c.finish()


def test_criterion_08_equatorial_criterion_machinery(capsys, rng):
    """Determinant and residual must change sign at the same brackets; the residual oddness must be exact."""
    c = Criterion(capsys, 8, "equatorial criterion machinery")
    brackets = []
    while len(brackets) < 10:
        base = rng.uniform(0, 2 * math.pi, 4)
        idx = int(rng.integers(4))
        scan = eq.equator_criterion_scan(base, idx, 1, grid=400)
        brackets.extend(scan.sign_changes)
    brackets = brackets[:10]
    agree = 0
    for b in brackets:
        d0, d1 = b["determinant_ends"]
        agree += bool(np.sign(d0) != np.sign(d1))
    kinds = [b["kind"] for b in brackets]
    c.check("det sign change at each of 10 residual brackets", agree == len(brackets),
            f"{agree}/{len(brackets)} agree; residual brackets are {kinds.count('pole')} poles "
            f"and {kinds.count('root')} roots; det = residual^2 >= 0")
    bad = 0
    for _ in range(1000):
        a, b = rng.uniform(0, 2 * math.pi, 2)
        if abs(math.sin(a - b)) < 1e-6:
            continue
        rest = [a + 2.0, a + 4.0]
        fwd = eq.equator_s_values([a, b, *rest], 1).s1
        back = eq.equator_s_values([b, a, *rest], 1).s1
        bad += back != -fwd
    c.check("s-value oddness exact on 1000 pairs", bad == 0, f"{bad} violations")
    c.finish()


def test_criterion_09_kite_report_integrity(capsys):
    c = Criterion(capsys, 9, "kite report integrity")
    ka = eq.kite_analyze(1)
    report = json.loads(json.dumps(ka.to_dict(), allow_nan=False))
    ivs = report["polynomial"]["root_intervals"]
    inside = [iv for iv in ivs if 0 < Fraction(iv["lo"]) < Fraction(iv["hi"]) < Fraction(1, 2)]
    c.check("root interval in (0,1/2)", len(inside) >= 1,
            ", ".join(f"[{iv['lo_decimal']:.12f},{iv['hi_decimal']:.12f}]" for iv in inside))
    c.check("transcendental grid finite", report["transcendental"]["all_finite"],
            f"{report['transcendental']['grid_points']} points")
    checks = report["cross_checks"]
    c.check("|f(sqrt x0)| reported", len(checks) == len(ivs) and all(isinstance(x["abs_residual"], float)
                                                                      for x in checks),
            ", ".join(f"{x['abs_residual']:.4g}" for x in checks))
    err = report["polynomial"]["float_vs_exact_max_error"]
    c.check("exact vs float Q at endpoints<1e-10", err < 1e-10, f"{err:.2e}")
    c.finish()


def test_criterion_10_integrator_order(capsys):
    c = Criterion(capsys, 10, "RK4 order")
    s = SystemState(1.0, [1.0, 0.5], [[0.4, 0.0], [-0.3, 0.1]], [[0.1, 0.9], [-0.2, -1.1]], Formulation.REDUCED)
    T, dt = 1.0, 0.05

    def end(h):
        n = round(T / h)
        t = propagate(s, IntegratorConfig(dt=h, steps=n, record_stride=n))
        return np.concatenate([t.positions[-1].ravel(), t.velocities[-1].ravel()])

    ref = end(dt / 16)
    ratio = np.linalg.norm(end(dt) - ref) / np.linalg.norm(end(dt / 2) - ref)
    c.check("ratio in [12,20]", 12 <= ratio <= 20, f"{ratio:.3f}")
    c.finish()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
