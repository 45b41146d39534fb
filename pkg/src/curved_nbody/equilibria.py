"""
Relative equilibria of the curved 4-body problem.

* equatorial quadrilaterals: the six s-values, the 4x4 linear mass system
  and its vanishing criterion s1 s6 + s3 s5 = s2 s4;
* squares with masses (m, m, 0, 0), which exist exactly when 3 kappa r^2 = 2;
* kites with masses (m, m, m, 0): the transcendental balance condition and
  its polynomial rationalization Q(x), analysed side by side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import polyroot
from .dynamics import Formulation, SystemState
from .errors import DomainError, SingularConfiguration
from .geometry import Curvature

SINGULAR_SINE = 1e-8
BISECTION_TOL = 1e-12
DEFAULT_GRID = 10_000
CROSS_CHECK_TOL = 1e-8
FLOAT_EXACT_TOL = 1e-10

# pair order of s1..s6, zero-based
S_PAIRS = ((0, 1), (1, 2), (2, 0), (3, 0), (1, 3), (2, 3))


# -- equatorial quadrilaterals -----------------------------------------------

@dataclass(frozen=True)
class SValues:
    s1: float
    s2: float
    s3: float
    s4: float
    s5: float
    s6: float

    def as_tuple(self) -> tuple[float, ...]:
        return (self.s1, self.s2, self.s3, self.s4, self.s5, self.s6)


def _check_equator(angles, c):
    c = Curvature.of(c)
    if c.kappa <= 0:
        raise DomainError("equatorial configurations exist only on the sphere (kappa > 0)")
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (4,):
        raise DomainError(f"need four angles, got shape {angles.shape}")
    return angles, c


def equator_s_values(angles, c) -> SValues:
    angles, c = _check_equator(angles, c)
    k32 = c.kappa**1.5
    vals = []
    for i, j in S_PAIRS:
        s = math.sin(angles[i] - angles[j])
        if abs(s) < SINGULAR_SINE:
            raise SingularConfiguration(
                f"bodies {i + 1} and {j + 1} coincide or are antipodal on the equator", pair=(i, j)
            )
        vals.append(k32 * s / abs(s) ** 3)
    return SValues(*vals)


def equator_criterion_residual(angles, c) -> float:
    """s1 s6 + s3 s5 - s2 s4; zero is necessary for an equatorial RE."""
    s1, s2, s3, s4, s5, s6 = equator_s_values(angles, c).as_tuple()
    return s1 * s6 + s3 * s5 - s2 * s4


def mass_system_from_s(s) -> np.ndarray:
    """The antisymmetric 4x4 matrix of the mass system for given s-values.

    Its determinant is (s1 s6 + s3 s5 - s2 s4)^2, the square of its Pfaffian.
    """
    s1, s2, s3, s4, s5, s6 = s.as_tuple() if isinstance(s, SValues) else tuple(float(x) for x in s)
    return np.array(
        [
            [0.0, -s1, s3, s4],
            [s1, 0.0, -s2, -s5],
            [-s3, s2, 0.0, -s6],
            [-s4, s5, s6, 0.0],
        ]
    )


def equator_mass_system(angles, c) -> np.ndarray:
    """Coefficient matrix of the linear system in (m1, m2, m3, m4)."""
    return mass_system_from_s(equator_s_values(angles, c))


def mass_nullspace(matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Singular values and the two right-singular vectors of the smallest ones.

    An antisymmetric 4x4 matrix has rank 4 or at most 2, so when it is
    singular these two vectors span its null space.
    """
    _, sv, vt = np.linalg.svd(matrix)
    return sv, vt[-2:].T


def equator_mass_nullspace(angles, c) -> tuple[np.ndarray, np.ndarray]:
    return mass_nullspace(equator_mass_system(angles, c))


def positive_mass_combination(basis: np.ndarray) -> np.ndarray | None:
    """A strictly positive vector in span(basis), normalized to sum 1, if one exists."""
    from scipy.optimize import linprog

    k = basis.shape[1]
    # maximize t subject to basis @ c >= t, -1 <= c <= 1
    cost = np.zeros(k + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([-basis, np.ones((basis.shape[0], 1))])
    res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(basis.shape[0]),
                  bounds=[(-1, 1)] * k + [(None, 1)], method="highs")
    if not res.success or res.x[-1] <= 1e-12:
        return None
    m = basis @ res.x[:k]
    return m / m.sum()


def _bisect(f, lo, hi, flo, tol=BISECTION_TOL, max_iter=200):
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class EquatorScan:
    curvature: Curvature
    base_angles: np.ndarray
    index: int
    grid: np.ndarray
    residuals: np.ndarray
    determinants: np.ndarray
    sign_changes: list[dict] = field(default_factory=list)
    skipped: list[float] = field(default_factory=list)

    @property
    def roots(self) -> list[dict]:
        return [e for e in self.sign_changes if e["kind"] == "root"]

    @property
    def min_abs_residual(self) -> float:
        return float(np.nanmin(np.abs(self.residuals)))

    def to_dict(self) -> dict:
        return {
            "kappa": self.curvature.kappa,
            "base_angles": [float(a) for a in self.base_angles],
            "varied_body": self.index + 1,
            "grid_points": int(self.grid.size),
            "skipped_singular_points": len(self.skipped),
            "residual_min": float(np.nanmin(self.residuals)) if self.residuals.size else None,
            "residual_max": float(np.nanmax(self.residuals)) if self.residuals.size else None,
            "min_abs_residual": self.min_abs_residual if self.residuals.size else None,
            "kappa_cubed": self.curvature.kappa**3,
            "roots": len(self.roots),
            "poles": len(self.sign_changes) - len(self.roots),
            "sign_changes": self.sign_changes,
        }


def equator_criterion_scan(base_angles, index: int, c, grid: int = 2000,
                           lo: float | None = None, hi: float | None = None) -> EquatorScan:
    """Vary one angle over (lo, hi), bracket sign changes of the criterion residual.

    Each bracket is bisected to BISECTION_TOL and classified as a root or
    as a pole (the residual blows up where two bodies become coincident or
    antipodal). Roots carry the determinant there, the null space of the
    mass system and a positive mass vector when one exists in it.

    With A = u12 u34, B = u31 u24, C = u23 u14 (u_ij = sin(phi_i - phi_j))
    one has A + B + C = 0 and residual = kappa^3 (f(A) + f(B) + f(C)) with
    f(x) = 1/(x|x|), whose modulus is at least kappa^3; expect poles only.
    """
    base, c = _check_equator(base_angles, c)
    lo = base[index] if lo is None else lo
    hi = lo + 2 * math.pi if hi is None else hi
    ts = np.linspace(lo, hi, grid + 2)[1:-1]

    def angles_at(t):
        a = base.copy()
        a[index] = t
        return a

    def res(t):
        return equator_criterion_residual(angles_at(t), c)

    vals = np.full(ts.size, np.nan)
    dets = np.full(ts.size, np.nan)
    skipped = []
    for k, t in enumerate(ts):
        try:
            vals[k] = res(t)
            dets[k] = np.linalg.det(equator_mass_system(angles_at(t), c))
        except SingularConfiguration:
            skipped.append(float(t))
    scan = EquatorScan(c, base, index, ts, vals, dets, skipped=skipped)
    for k in range(ts.size - 1):
        a, b = vals[k], vals[k + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or np.sign(a) == np.sign(b):
            continue
        entry = {
            "bracket": [float(ts[k]), float(ts[k + 1])],
            "residual_ends": [float(a), float(b)],
            "determinant_ends": [float(dets[k]), float(dets[k + 1])],
        }
        try:
            t0 = _bisect(res, ts[k], ts[k + 1], a)
            r0 = res(t0)
        except SingularConfiguration:
            entry["kind"] = "pole"
            scan.sign_changes.append(entry)
            continue
        # a sign flip across a pole of the residual is not a root
        if abs(r0) > 1e-6 * (abs(a) + abs(b)):
            entry["kind"] = "pole"
            scan.sign_changes.append(entry)
            continue
        ang = angles_at(t0)
        sv, basis = equator_mass_nullspace(ang, c)
        m = positive_mass_combination(basis)
        entry.update(
            {
                "kind": "root",
                "angle": float(t0),
                "angles": [float(x) for x in ang],
                "residual": float(r0),
                "determinant": float(np.linalg.det(equator_mass_system(ang, c))),
                "singular_values": [float(x) for x in sv],
                "null_space": basis.T.tolist(),
                "positive_masses": None if m is None else [float(x) for x in m],
            }
        )
        scan.sign_changes.append(entry)
    return scan


# -- squares with two negligible masses --------------------------------------

@dataclass(frozen=True)
class SquareRE:
    radius: float
    alpha: float
    alpha_sq: float
    mass: float
    curvature: Curvature
    positions: np.ndarray
    velocities: np.ndarray

    @property
    def masses(self) -> np.ndarray:
        return np.array([self.mass, self.mass, 0.0, 0.0])

    @property
    def period(self) -> float:
        return 2 * math.pi / self.alpha

    def state(self) -> SystemState:
        return SystemState(self.curvature, self.masses, self.positions, self.velocities, Formulation.REDUCED)

    def to_dict(self) -> dict:
        return {
            "exists": True,
            "kappa": self.curvature.kappa,
            "mass": self.mass,
            "radius": self.radius,
            "alpha": self.alpha,
            "alpha_sq": self.alpha_sq,
            "period": self.period,
            "three_kappa_r_sq": 3 * self.curvature.kappa * self.radius**2,
            "masses": self.masses.tolist(),
            "positions": self.positions.tolist(),
            "velocities": self.velocities.tolist(),
        }


def circle_state_arrays(radius: float, alpha: float, phases) -> tuple[np.ndarray, np.ndarray]:
    """Planar positions and tangential velocities of rigid rotation at rate ``alpha``."""
    ph = np.asarray(phases, dtype=float)
    pos = radius * np.stack([np.cos(ph), np.sin(ph)], axis=1)
    vel = alpha * np.stack([-pos[:, 1], pos[:, 0]], axis=1)
    return pos, vel


def square_alpha_consistency(m: float, r: float, c) -> tuple[float, float]:
    """Angular velocity squared required by the massive pair and by the test pair."""
    c = Curvature.of(c)
    k = c.kappa
    if not r > 0:
        raise DomainError("radius must be positive")
    w = 1.0 - k * r * r
    rho2 = 2.0 * r * r
    w4 = 1.0 - k * rho2 / 4.0
    if w <= 0 or w4 <= 0:
        raise DomainError("kappa r^2 must stay below 1 on the sphere")
    first = m / (4.0 * r**3 * w**1.5)
    second = 2.0 * m * (1.0 - k * rho2 / 2.0) / (rho2**1.5 * w4**1.5 * w)
    return first, second


def square_re(m: float, c, radius_scale: float = 1.0) -> SquareRE | None:
    """Square relative equilibrium, or None off the sphere.

    ``radius_scale`` multiplies the equilibrium radius while keeping its
    angular velocity, which builds the perturbed (non-equilibrium) state
    used to show that drift detection works.
    """
    c = Curvature.of(c)
    if not m > 0:
        raise DomainError("mass must be positive")
    if c.kappa <= 0:
        return None
    r = math.sqrt(2.0 / 3.0) / c.sqrt_abs
    alpha_sq = m / (4.0 * r**3 * (1.0 - c.kappa * r * r) ** 1.5)
    alpha = math.sqrt(alpha_sq)
    pos, vel = circle_state_arrays(r * radius_scale, alpha, (0.0, math.pi, math.pi / 2, -math.pi / 2))
    # cos(pi/2) etc. are not exactly zero
    pos[np.abs(pos) < 1e-15 * r] = 0.0
    vel[np.abs(vel) < 1e-15 * r * alpha] = 0.0
    return SquareRE(r, alpha, alpha_sq, float(m), c, pos, vel)


# -- kites with one negligible mass ------------------------------------------

KITE_PHASES = (0.0, 2 * math.pi / 3, 4 * math.pi / 3, -math.pi / 3)


def kite_state(m: float, r: float, alpha: float, c) -> SystemState:
    c = Curvature.of(c)
    if not r > 0:
        raise DomainError("radius must be positive")
    if c.kappa > 0 and c.kappa * r * r >= 1:
        raise DomainError("kite radius must satisfy kappa r^2 < 1")
    pos, vel = circle_state_arrays(r, alpha, KITE_PHASES)
    return SystemState(c, [m, m, m, 0.0], pos, vel, Formulation.REDUCED)


def _kite_terms(r, k):
    r2 = np.asarray(r, dtype=float) ** 2
    return 1.0 - 0.75 * k * r2, 1.0 - k * r2, 1.0 - 0.25 * k * r2


def kite_residual_array(r, c) -> np.ndarray:
    """Vectorized condition residual; NaN where the expression is undefined."""
    c = Curvature.of(c)
    t3, t1, t4 = _kite_terms(r, c.kappa)
    ok = (t3 > 0) & (t1 > 0) & (t4 > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = 1.0 / (math.sqrt(3.0) * t3**1.5) - 1.0 / (4.0 * t1**1.5) - 1.0 / t4**1.5
    return np.where(ok, val, np.nan)


def kite_condition_residual(r: float, c) -> float:
    """Triangle balance minus test-particle balance, both divided by m / r^3."""
    c = Curvature.of(c)
    t3, t1, t4 = (float(t) for t in _kite_terms(r, c.kappa))
    if min(t3, t1, t4) <= 0:
        raise DomainError(f"kite condition undefined at r={r} for kappa={c.kappa}")
    return 1.0 / (math.sqrt(3.0) * t3**1.5) - 1.0 / (4.0 * t1**1.5) - 1.0 / t4**1.5


def kite_alpha_sq(m: float, r: float, c) -> tuple[float, float]:
    """(alpha^2 balancing the triangle, alpha^2 balancing the massless body)."""
    c = Curvature.of(c)
    if not r > 0:
        raise DomainError("radius must be positive")
    t3, t1, t4 = (float(t) for t in _kite_terms(r, c.kappa))
    if min(t3, t1, t4) <= 0:
        raise DomainError(f"kite angular velocity undefined at r={r} for kappa={c.kappa}")
    r3 = r**3
    return m / (math.sqrt(3.0) * r3 * t3**1.5), m / (4.0 * r3 * t1**1.5) + m / (r3 * t4**1.5)


def _frac(v: Fraction) -> dict:
    return {"exact": str(v), "decimal": polyroot.fraction_to_decimal(v)}


@dataclass
class KiteAnalysis:
    """Computed evidence about kite equilibria at one curvature; no verdict is assumed."""

    curvature: Curvature
    kappa_exact: Fraction
    domain_x: tuple[Fraction, Fraction]
    sign_changes: int
    q_at_zero: Fraction
    q_at_half_inverse_kappa: Fraction | None
    root_intervals: list[polyroot.RootInterval]
    unresolved: list
    grid_r: np.ndarray
    grid_residual: np.ndarray
    skipped_grid: list[float]
    transcendental_roots: list[float]
    cross_checks: list[dict]
    float_exact_max_error: float
    readings: dict

    @property
    def polynomial_root_exists(self) -> bool:
        return bool(self.root_intervals)

    @property
    def transcendental_root_exists(self) -> bool:
        return bool(self.transcendental_roots)

    @property
    def consistent(self) -> bool:
        """Every polynomial root solves the condition and every condition root is a polynomial root."""
        if any(cc["residual"] is None or abs(cc["residual"]) > CROSS_CHECK_TOL for cc in self.cross_checks):
            return False
        xs = [float(iv.midpoint) for iv in self.root_intervals]
        return all(any(abs(r * r - x) < 1e-6 for x in xs) for r in self.transcendental_roots)

    @property
    def grid_finite(self) -> bool:
        return bool(np.isfinite(self.grid_residual).all())

    def to_dict(self) -> dict:
        g = self.grid_residual
        return {
            "kappa": self.curvature.kappa,
            "kappa_exact": str(self.kappa_exact),
            "polynomial": {
                "domain_x": [str(self.domain_x[0]), str(self.domain_x[1])],
                "descartes_sign_changes": self.sign_changes,
                "Q(0)": _frac(self.q_at_zero),
                "Q(1/(2 kappa))": None if self.q_at_half_inverse_kappa is None else _frac(self.q_at_half_inverse_kappa),
                "root_intervals": [
                    {"lo": str(iv.lo), "hi": str(iv.hi), "lo_decimal": float(iv.lo), "hi_decimal": float(iv.hi),
                     "sign_lo": iv.sign_lo, "sign_hi": iv.sign_hi}
                    for iv in self.root_intervals
                ],
                "unresolved": [[str(a), str(b), v] for a, b, v in self.unresolved],
                "note": "sign bisection certifies odd-multiplicity roots only",
                "float_vs_exact_max_error": self.float_exact_max_error,
            },
            "transcendental": {
                "grid_points": int(self.grid_r.size),
                "r_range": [float(self.grid_r[0]), float(self.grid_r[-1])] if self.grid_r.size else None,
                "skipped_points": len(self.skipped_grid),
                "all_finite": self.grid_finite,
                "residual_min": float(np.nanmin(g)) if g.size else None,
                "residual_max": float(np.nanmax(g)) if g.size else None,
                "r_at_max": float(self.grid_r[int(np.nanargmax(g))]) if g.size else None,
                "roots": self.transcendental_roots,
            },
            "cross_checks": self.cross_checks,
            "interval_readings": self.readings,
            "verdict": {
                "polynomial_root_exists": self.polynomial_root_exists,
                "transcendental_root_exists": self.transcendental_root_exists,
                "consistent": self.consistent,
            },
        }


def _upper_x(c: Curvature, q: polyroot.RationalPolynomial, kexact: Fraction) -> Fraction:
    if c.kappa > 0:
        return 1 / kexact
    return polyroot.cauchy_bound(q)


def kite_analyze(c, grid: int = DEFAULT_GRID, depth: int = polyroot.DEFAULT_DEPTH) -> KiteAnalysis:
    c = Curvature.of(c)
    if c.kappa == 0:
        raise DomainError("kite analysis needs nonzero curvature")
    kexact = c.exact if c.exact is not None else Fraction(c.kappa)
    q = polyroot.q_coefficients(kexact)
    hi_x = _upper_x(c, q, kexact)
    iso = polyroot.isolate(q, 0, hi_x, depth)

    float_err = 0.0
    for iv in iso.intervals:
        for x in (iv.lo, iv.hi):
            float_err = max(float_err, abs(q.eval_float(float(x)) - float(q(x))))

    r_hi = c.radius if c.kappa > 0 else math.sqrt(float(hi_x))
    rs = np.linspace(0.0, r_hi, grid + 2)[1:-1]
    vals = kite_residual_array(rs, c)
    skipped = [float(r) for r in rs[~np.isfinite(vals)]]
    keep = np.isfinite(vals)
    rs_ok, vals_ok = rs[keep], vals[keep]

    roots = []
    for k in range(rs_ok.size - 1):
        a, b = vals_ok[k], vals_ok[k + 1]
        if a == 0:
            roots.append(float(rs_ok[k]))
        elif np.sign(a) != np.sign(b) and b != 0:
            roots.append(_bisect(lambda r: kite_condition_residual(r, c), rs_ok[k], rs_ok[k + 1], a))

    checks = []
    for iv in iso.intervals:
        x0 = float(iv.midpoint)
        r0 = math.sqrt(x0)
        try:
            res = kite_condition_residual(r0, c)
        except DomainError:
            res = None
        checks.append({"x0": x0, "r0": r0, "residual": res, "abs_residual": None if res is None else abs(res)})

    q_half = q(1 / (2 * kexact)) if c.kappa > 0 else None
    readings = _interval_readings(c, iso.intervals)
    return KiteAnalysis(
        curvature=c,
        kappa_exact=kexact,
        domain_x=(Fraction(0), hi_x),
        sign_changes=polyroot.descartes_sign_changes(q),
        q_at_zero=q(0),
        q_at_half_inverse_kappa=q_half,
        root_intervals=iso.intervals,
        unresolved=iso.unresolved,
        grid_r=rs_ok,
        grid_residual=vals_ok,
        skipped_grid=skipped,
        transcendental_roots=roots,
        cross_checks=checks,
        float_exact_max_error=float_err,
        readings=readings,
    )


def _interval_readings(c: Curvature, intervals) -> dict:
    """Which polynomial roots fall in each reading of the existence interval."""
    xs = [float(iv.midpoint) for iv in intervals]
    if c.kappa <= 0:
        return {"positive_roots": len(xs)}
    rad = c.radius
    return {
        "presumed": {
            "x_interval": [0.0, 1.0 / c.kappa],
            "r_interval": [0.0, rad],
            "roots_in_x_interval": sum(0 < x < 1.0 / c.kappa for x in xs),
            "roots_in_r_interval": sum(0 < math.sqrt(x) < rad for x in xs),
        },
        "as_printed": {
            "x_interval": [0.0, rad],
            "r_interval": [0.0, 1.0 / c.kappa],
            "roots_in_x_interval": sum(0 < x < rad for x in xs),
            "roots_in_r_interval": sum(0 < math.sqrt(x) < 1.0 / c.kappa for x in xs),
        },
    }
