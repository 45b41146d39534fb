"""Command-line front end: ``curved-nbody simulate|equilibria|poly|version``."""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, equilibria, polyroot
from .dynamics import interacting_pairs, pairs, to_ambient
from .errors import CurvedNBodyError, DomainError, DriftAlarm, ProjectionError, SingularConfiguration
from .geometry import Curvature
from .integrate import distance_drift, propagate
from .kernels import get_backend
from .scenario import ScenarioError, load_scenario, parse_curvature, scenario_dict

LOG_ENV = "CURVED_NBODY_LOG"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_SINGULAR = 3
EXIT_DRIFT = 4
EXIT_PROJECTION = 5

DEFAULT_SEED = 20240229

log = logging.getLogger("curved_nbody")


class UsageError(Exception):
    pass


def _setup_logging():
    level = os.environ.get(LOG_ENV, "WARNING").strip().upper() or "WARNING"
    if level.isdigit():
        level = int(level)
    elif not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _rational(text: str, what: str) -> Fraction:
    try:
        return polyroot.as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise UsageError(f"{what} must be an exact rational like 3/4, got {text!r}")


def _curvature(text: str) -> Curvature:
    try:
        return parse_curvature(text, field="--kappa")
    except ScenarioError:
        raise UsageError(f"--kappa must be 'p/q' or a decimal, got {text!r}")


def _dump(obj, out: str | None):
    text = json.dumps(obj, indent=2, sort_keys=False, allow_nan=False, default=_jsonable) + "\n"
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        p = Path(out)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, Fraction):
        return str(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _clean(obj):
    """Replace non-finite floats by None so reports stay strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


# -- simulate ------------------------------------------------------------------

def trajectory_header(n: int) -> list[str]:
    cols = ["t"]
    for i in range(1, n + 1):
        cols += [f"{a}{i}" for a in ("x", "y", "z", "vx", "vy", "vz")]
    cols += [f"rho{i + 1}{j + 1}" for i, j in pairs(n)]
    cols.append("residual_max")
    return cols


def write_trajectory(path: Path, traj):
    n = len(traj.masses)
    rows = []
    for k in range(len(traj)):
        p, v = to_ambient(traj.state(k))
        body = np.concatenate([p, v], axis=1).ravel()
        rows.append(np.concatenate([[traj.times[k]], body, traj.distances[k], [traj.residuals[k]]]))
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.asarray(rows), delimiter=",", fmt="%.17g",
               header=",".join(trajectory_header(n)), comments="")


def cmd_simulate(args) -> int:
    sc = load_scenario(args.file)
    state = sc.initial_state()
    be = get_backend(args.backend)
    report_path = Path(args.out) if args.out else sc.outputs.report
    summary = {
        "scenario": str(sc.source) if sc.source else None,
        "name": sc.name,
        "curvature": sc.curvature_record(),
        "formulation": sc.formulation.value,
        "bodies": len(sc.masses),
        "masses": sc.masses,
        "dt": sc.integrator.dt,
        "steps": sc.integrator.steps,
        "projection": sc.integrator.projection,
        "drift_alarm": sc.integrator.drift_alarm,
        "record_stride": sc.outputs.record_stride,
        "backend": be.__name__.rsplit("_", 1)[-1],
    }
    t0 = time.perf_counter()
    status, code, traj = "ok", EXIT_OK, None
    try:
        traj = propagate(state, sc.integrator, backend=args.backend)
    except (SingularConfiguration, DriftAlarm) as exc:
        traj = getattr(exc, "trajectory", None)
        status = "singular" if isinstance(exc, SingularConfiguration) else "drift_alarm"
        code = EXIT_SINGULAR if isinstance(exc, SingularConfiguration) else EXIT_DRIFT
        summary["error"] = {"category": status, "message": str(exc), "time": getattr(exc, "time", None)}
    wall = time.perf_counter() - t0

    summary["status"] = status
    if traj is not None and len(traj):
        index = traj.pair_index
        d = np.asarray(traj.distances)
        summary.update({
            "snapshots": len(traj),
            "final_time": traj.times[-1],
            "distance_drift": distance_drift(traj),
            "pair_drift": {
                f"rho{i + 1}{j + 1}": float(np.max(np.abs(d[:, k] - d[0, k]))) for k, (i, j) in enumerate(index)
            },
            "interacting_pairs": [f"rho{i + 1}{j + 1}" for i, j in interacting_pairs(traj.masses)],
            "residual_max": float(np.max(traj.residuals)),
            "step_residual_max": traj.max_step_residual,
        })
        if sc.outputs.trajectory is not None:
            write_trajectory(sc.outputs.trajectory, traj)
            summary["trajectory"] = str(sc.outputs.trajectory)
    summary["timing"] = {"wall_seconds": wall}
    _dump(_clean(summary), str(report_path) if report_path else None)
    if code != EXIT_OK:
        print(json.dumps(summary["error"]), file=sys.stderr)
    return code


# -- equilibria ----------------------------------------------------------------

def _mass(v: float) -> float:
    if not (math.isfinite(v) and v > 0):
        raise UsageError(f"--mass must be a positive number, got {v}")
    return v


def cmd_square(args) -> int:
    c = _curvature(args.kappa)
    m = _mass(args.mass)
    sq = equilibria.square_re(m, c)
    if sq is None:
        report = {"exists": False, "kappa": c.kappa, "mass": m,
                  "reason": "no square equilibrium with two equal masses unless kappa > 0"}
        _dump(report, args.out)
        return EXIT_OK
    first, second = equilibria.square_alpha_consistency(m, sq.radius, c)
    report = sq.to_dict()
    report["kappa_exact"] = None if c.exact is None else str(c.exact)
    report["alpha_sq_massive_pair"] = first
    report["alpha_sq_test_pair"] = second
    report["alpha_sq_difference"] = abs(first - second)
    if args.emit_scenario:
        target = Path(args.emit_scenario)
        stem = target.stem
        steps = math.ceil(round(args.periods * sq.period / args.dt, 6))
        sc = scenario_dict(
            args.kappa, "reduced", sq.masses, sq.positions, sq.velocities, args.dt, steps,
            {"trajectory": f"{stem}.csv", "report": f"{stem}.report.json", "record_stride": args.stride},
            name=f"square relative equilibrium, kappa={args.kappa}, m={m:g}, {args.periods:g} periods",
        )
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(json.dumps(sc, indent=2) + "\n")
        report["scenario"] = str(target)
    _dump(report, args.out)
    return EXIT_OK


def cmd_kite(args) -> int:
    c = _curvature(args.kappa)
    if c.exact is None:
        c = Curvature.of(Fraction(c.kappa))
    if c.kappa == 0:
        raise UsageError("kite analysis needs kappa != 0")
    if args.grid < 2 or args.depth < 1:
        raise UsageError("--grid must be >= 2 and --depth >= 1")
    ka = equilibria.kite_analyze(c, grid=args.grid, depth=args.depth)
    _dump(_clean(ka.to_dict()), args.out)
    return EXIT_OK


def cmd_equator(args) -> int:
    c = _curvature(args.kappa)
    if not c.kappa > 0:
        raise UsageError("the equator exists only for kappa > 0")
    if args.angles:
        try:
            base = [float(a) for a in args.angles.split(",")]
        except ValueError:
            raise UsageError(f"--angles needs four comma-separated numbers, got {args.angles!r}")
        if len(base) != 4:
            raise UsageError("--angles needs exactly four values")
    else:
        rng = np.random.default_rng(args.seed)
        base = sorted(rng.uniform(0.0, 2 * math.pi, 4).tolist())
    if not 0 <= args.index < 4:
        raise UsageError("--index must be 0..3")
    if args.grid < 2:
        raise UsageError("--grid must be >= 2")
    lo = args.lo if args.lo is not None else 0.0
    hi = args.hi if args.hi is not None else 2 * math.pi
    if not lo < hi:
        raise UsageError("need --lo < --hi")
    scan = equilibria.equator_criterion_scan(base, args.index, c, grid=args.grid, lo=lo, hi=hi)
    report = scan.to_dict()
    report["seed"] = None if args.angles else args.seed
    _dump(_clean(report), args.out)
    return EXIT_OK


# -- poly ----------------------------------------------------------------------

def _poly(args):
    k = _rational(args.kappa, "--kappa")
    return k, polyroot.q_coefficients(k)


def cmd_poly_eval(args) -> int:
    k, q = _poly(args)
    x = _rational(args.x, "--x")
    v = polyroot.eval_exact(q, x)
    _dump({"kappa": str(k), "x": str(x), "exact": str(v), "decimal": polyroot.fraction_to_decimal(v, 15)}, args.out)
    return EXIT_OK


def cmd_poly_signs(args) -> int:
    k, q = _poly(args)
    _dump({"kappa": str(k), "sign_changes": polyroot.descartes_sign_changes(q)}, args.out)
    return EXIT_OK


def cmd_poly_roots(args) -> int:
    k, q = _poly(args)
    lo = _rational(args.lo, "--lo")
    if args.hi is None:
        hi = 1 / k if k > 0 else polyroot.cauchy_bound(q)
    else:
        hi = _rational(args.hi, "--hi")
    if not lo < hi:
        raise UsageError("need --lo < --hi")
    if args.depth < 1:
        raise UsageError("--depth must be >= 1")
    iso = polyroot.isolate(q, lo, hi, args.depth)
    _dump({
        "kappa": str(k),
        "lo": str(lo),
        "hi": str(hi),
        "depth": args.depth,
        "descartes_bound": polyroot.interval_sign_changes(q, lo, hi),
        "intervals": [
            {"lo": str(iv.lo), "hi": str(iv.hi), "lo_decimal": float(iv.lo), "hi_decimal": float(iv.hi),
             "sign_lo": iv.sign_lo, "sign_hi": iv.sign_hi}
            for iv in iso.intervals
        ],
        "unresolved": [[str(a), str(b), v] for a, b, v in iso.unresolved],
    }, args.out)
    return EXIT_OK


def cmd_version(args) -> int:
    print(__version__)
    return EXIT_OK


# -- wiring --------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "usage", "message": message}), file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for any randomized choice")

    p = _Parser(prog="curved-nbody", description="N-body dynamics on spheres and hyperbolic spheres.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", parents=[common], help="propagate a JSON scenario")
    sim.add_argument("file")
    sim.add_argument("--backend", choices=["numba", "numpy"], default=None)
    sim.set_defaults(func=cmd_simulate)

    eq = sub.add_parser("equilibria", help="relative equilibria analyses")
    eqs = eq.add_subparsers(dest="which", required=True, parser_class=_Parser)
    sq = eqs.add_parser("square", parents=[common], help="square equilibrium with two test masses")
    sq.add_argument("--kappa", default="1")
    sq.add_argument("--mass", type=float, default=1.0)
    sq.add_argument("--emit-scenario", metavar="PATH", help="also write a ready-to-run scenario")
    sq.add_argument("--periods", type=float, default=2.0, help="horizon of the emitted scenario")
    sq.add_argument("--dt", type=float, default=1e-4, help="step of the emitted scenario")
    sq.add_argument("--stride", type=int, default=100, help="record stride of the emitted scenario")
    sq.set_defaults(func=cmd_square)
    kt = eqs.add_parser("kite", parents=[common], help="kite analysis: polynomial versus condition")
    kt.add_argument("--kappa", default="1")
    kt.add_argument("--grid", type=int, default=equilibria.DEFAULT_GRID)
    kt.add_argument("--depth", type=int, default=polyroot.DEFAULT_DEPTH)
    kt.set_defaults(func=cmd_kite)
    et = eqs.add_parser("equator", parents=[common], help="scan the four-body equatorial criterion")
    et.add_argument("--kappa", default="1")
    et.add_argument("--angles", help="four comma-separated base angles; random (from --seed) if omitted")
    et.add_argument("--index", type=int, default=3, help="which angle to vary")
    et.add_argument("--grid", type=int, default=2000)
    et.add_argument("--lo", type=float)
    et.add_argument("--hi", type=float)
    et.set_defaults(func=cmd_equator)

    po = sub.add_parser("poly", help="the kite polynomial Q(x)")
    pos = po.add_subparsers(dest="which", required=True, parser_class=_Parser)
    ev = pos.add_parser("eval", parents=[common], help="exact value of Q at x")
    ev.add_argument("--kappa", default="1")
    ev.add_argument("--x", required=True)
    ev.set_defaults(func=cmd_poly_eval)
    sg = pos.add_parser("signs", parents=[common], help="coefficient sign changes")
    sg.add_argument("--kappa", default="1")
    sg.set_defaults(func=cmd_poly_signs)
    rt = pos.add_parser("roots", parents=[common], help="isolate sign-change roots")
    rt.add_argument("--kappa", default="1")
    rt.add_argument("--lo", default="0")
    rt.add_argument("--hi", help="default 1/kappa on the sphere, a root bound otherwise")
    rt.add_argument("--depth", type=int, default=polyroot.DEFAULT_DEPTH)
    rt.set_defaults(func=cmd_poly_roots)

    ve = sub.add_parser("version", help="print the package version")
    ve.set_defaults(func=cmd_version)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except ScenarioError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return EXIT_USAGE
    except SingularConfiguration as exc:
        print(json.dumps({"error": "singular", "message": str(exc)}), file=sys.stderr)
        return EXIT_SINGULAR
    except DriftAlarm as exc:
        print(json.dumps({"error": "drift_alarm", "message": str(exc)}), file=sys.stderr)
        return EXIT_DRIFT
    except DomainError as exc:
        print(json.dumps({"error": "domain", "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except CurvedNBodyError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_PROJECTION if isinstance(exc, ProjectionError) else EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
