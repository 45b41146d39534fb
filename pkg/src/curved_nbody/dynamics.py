"""
Accelerations of the curved N-body problem (2 <= N <= 4) in four charts.

``extrinsic``
    ambient (x, y, z) on the surface, velocities tangent to it.
``cylindrical``
    (phi, omega): azimuth and height, sphere only.
``reduced``
    planar (x, y) with z eliminated through the surface equation.
``equator``
    azimuth phi only, every body on the great circle omega = -kappa^(-1/2).

Masses may be zero: a massless body feels every force and exerts none,
and pairs of massless bodies are never evaluated.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from .errors import DomainError, PoleSingularity, ProjectionError, SingularConfiguration
from .geometry import Curvature
from .kernels import _codes as codes
from .kernels import get_backend

MIN_BODIES = 2
MAX_BODIES = 4


class Formulation(str, enum.Enum):
    EXTRINSIC = "extrinsic"
    CYLINDRICAL = "cylindrical"
    REDUCED = "reduced"
    EQUATOR = "equator"

    @property
    def code(self) -> int:
        return _CODES[self]

    @property
    def dim(self) -> int:
        """Number of coordinates per body."""
        return _DIMS[self]


_CODES = {
    Formulation.EXTRINSIC: codes.EXTRINSIC,
    Formulation.CYLINDRICAL: codes.CYLINDRICAL,
    Formulation.REDUCED: codes.REDUCED,
    Formulation.EQUATOR: codes.EQUATOR,
}
_DIMS = {
    Formulation.EXTRINSIC: 3,
    Formulation.CYLINDRICAL: 2,
    Formulation.REDUCED: 2,
    Formulation.EQUATOR: 1,
}


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SystemState:
    """Masses, positions and velocities in one chart at one instant.

    Arrays are copied and made read-only. Construction checks shapes,
    masses and the chart's domain; pass ``check=False`` for snapshots that
    are allowed to carry integration drift.
    """

    curvature: Curvature
    masses: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    formulation: Formulation = Formulation.EXTRINSIC
    time: float = 0.0
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "curvature", Curvature.of(self.curvature))
        set_(self, "formulation", Formulation(self.formulation))
        set_(self, "masses", _frozen(self.masses))
        d = self.formulation.dim
        pos = np.array(self.positions, dtype=float)
        vel = np.array(self.velocities, dtype=float)
        if d == 1:
            pos = pos.reshape(-1, 1)
            vel = vel.reshape(-1, 1)
        set_(self, "positions", _frozen(pos))
        set_(self, "velocities", _frozen(vel))
        n = self.masses.shape[0]
        if self.masses.ndim != 1 or not MIN_BODIES <= n <= MAX_BODIES:
            raise DomainError(f"need {MIN_BODIES}..{MAX_BODIES} bodies, got masses of shape {self.masses.shape}")
        if self.positions.shape != (n, d) or self.velocities.shape != (n, d):
            raise DomainError(
                f"{self.formulation.value} positions and velocities must have shape ({n}, {d}), "
                f"got {self.positions.shape} and {self.velocities.shape}"
            )
        if (self.masses < 0).any() or not np.isfinite(self.masses).all():
            raise DomainError("masses must be finite and nonnegative")
        if not (np.isfinite(self.positions).all() and np.isfinite(self.velocities).all()):
            raise DomainError("positions and velocities must be finite")
        if self.check:
            self._check_domain()

    def _check_domain(self):
        c = self.curvature
        f = self.formulation
        if f is Formulation.EXTRINSIC:
            if not geo.on_surface(self.positions, c):
                raise DomainError("extrinsic positions are off the surface")
            vres = np.abs(geo.velocity_constraint_residual(self.positions, self.velocities, c))
            if np.any(vres > geo.ON_SURFACE_TOL):
                raise DomainError("extrinsic velocities are not tangent to the surface")
            if c.kappa < 0 and (self.positions[:, 2] < -geo.ON_SURFACE_TOL).any():
                raise DomainError("hyperbolic positions must lie on the upper sheet z >= 0")
        elif f is Formulation.REDUCED:
            if c.kappa > 0 and (geo.a_value(self.positions) >= 1.0 / c.kappa).any():
                raise DomainError("reduced positions need x^2 + y^2 < 1/kappa")
        elif f in (Formulation.CYLINDRICAL, Formulation.EQUATOR):
            if c.kappa <= 0:
                raise DomainError(f"the {f.value} chart exists only on the sphere (kappa > 0)")
            if f is Formulation.CYLINDRICAL:
                om = self.positions[:, 1]
                if ((om > 0) | (om < -2.0 * c.radius)).any():
                    raise DomainError("cylindrical heights must lie in [-2 kappa^(-1/2), 0]")

    @property
    def n(self) -> int:
        return self.masses.shape[0]

    def replace(self, **changes) -> "SystemState":
        kw = dict(
            curvature=self.curvature,
            masses=self.masses,
            positions=self.positions,
            velocities=self.velocities,
            formulation=self.formulation,
            time=self.time,
            check=self.check,
        )
        kw.update(changes)
        return SystemState(**kw)


def raise_for_status(info, time=None, what="acceleration"):
    """Translate a kernel status triple into the matching exception."""
    code, i, j = int(info[0]), int(info[1]), int(info[2])
    where = "" if time is None else f" at t={time:.12g}"
    if code == codes.OK:
        return
    if code == codes.SINGULAR:
        raise SingularConfiguration(
            f"bodies {i + 1} and {j + 1} collide or are antipodal{where}", pair=(i, j), time=time
        )
    if code == codes.POLE:
        raise PoleSingularity(f"body {i + 1} reached a pole{where}", pair=(i, i), time=time)
    if code == codes.DOMAIN:
        body = f"body {i + 1} " if i >= 0 else ""
        raise DomainError(f"{body}left the chart's domain{where}")
    if code == codes.NONFINITE:
        raise SingularConfiguration(f"non-finite {what} for body {i + 1}{where}", pair=(i, i), time=time)
    if code == codes.PROJECTION:
        raise ProjectionError(f"state drifted too far to project back{where}")
    raise RuntimeError(f"unknown kernel status {code}")


def _evaluate(state: SystemState, formulation: Formulation, backend=None,
              threshold: float = codes.SINGULAR_THRESHOLD) -> np.ndarray:
    if state.formulation is not formulation:
        raise DomainError(f"expected a {formulation.value} state, got {state.formulation.value}")
    be = get_backend(backend)
    pos = np.ascontiguousarray(state.positions, dtype=float).copy()
    vel = np.ascontiguousarray(state.velocities, dtype=float).copy()
    out = np.zeros_like(pos)
    info = np.zeros(3, dtype=np.int64)
    be.accel(formulation.code, pos, vel, state.masses.copy(), state.curvature.kappa, threshold, out, info)
    raise_for_status(info)
    return out


def accel_extrinsic(state: SystemState, backend=None) -> np.ndarray:
    """Ambient accelerations, shape (N, 3).

    The force numerators use positions relative to the surface center,
    so the z component carries an extra ``sigma |kappa|^(1/2) r^2 / 2``
    compared with a literal reading in tangent-plane coordinates; without
    it the acceleration leaves the tangent plane. At kappa = 0 this is
    Newtonian gravity in the plane z = 0.
    """
    return _evaluate(state, Formulation.EXTRINSIC, backend)


def accel_cylindrical(state: SystemState, backend=None) -> np.ndarray:
    """(phi'', omega'') per body, shape (N, 2); sphere only."""
    return _evaluate(state, Formulation.CYLINDRICAL, backend)


def accel_reduced(state: SystemState, backend=None) -> np.ndarray:
    """Planar (x'', y'') per body, shape (N, 2)."""
    return _evaluate(state, Formulation.REDUCED, backend)


def accel_equator(angles, masses, c, backend=None) -> np.ndarray:
    """phi'' for bodies on the equator: kappa^(3/2) sum m_j sin(d)/|sin(d)|^3."""
    c = Curvature.of(c)
    if c.kappa <= 0:
        raise DomainError("the equator exists only on the sphere (kappa > 0)")
    angles = np.asarray(angles, dtype=float)
    state = SystemState(c, masses, angles.reshape(-1, 1), np.zeros((angles.size, 1)), Formulation.EQUATOR)
    return _evaluate(state, Formulation.EQUATOR, backend)[:, 0]


def accelerations(state: SystemState, backend=None) -> np.ndarray:
    """Accelerations in whatever chart the state is expressed in."""
    return _evaluate(state, state.formulation, backend)


# -- chart conversions -------------------------------------------------------

def _extrinsic_from(state: SystemState) -> tuple[np.ndarray, np.ndarray]:
    c = state.curvature
    f = state.formulation
    pos, vel = state.positions, state.velocities
    if f is Formulation.EXTRINSIC:
        return pos.copy(), vel.copy()
    if f is Formulation.REDUCED:
        return geo.lift(pos, c), geo.lift_velocity(pos, vel, c)
    if f is Formulation.EQUATOR:
        phi, dphi = pos[:, 0], vel[:, 0]
        pos = np.stack([phi, np.full_like(phi, -c.radius)], axis=1)
        vel = np.stack([dphi, np.zeros_like(dphi)], axis=1)
    # cylindrical
    sq, rad = c.sqrt_abs, c.radius
    phi, om = pos[:, 0], pos[:, 1]
    dphi, dom = vel[:, 0], vel[:, 1]
    big = np.maximum(-rad * om * (sq * om + 2.0), 0.0)
    root = np.sqrt(big)
    dbig = -2.0 * rad * dom * (sq * om + 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        droot = np.where(root > 0, dbig / (2.0 * root), 0.0)
    cos, sin = np.cos(phi), np.sin(phi)
    p = np.stack([root * cos, root * sin, om], axis=1)
    v = np.stack([droot * cos - root * sin * dphi, droot * sin + root * cos * dphi, dom], axis=1)
    return p, v


def convert(state: SystemState, target) -> SystemState:
    """Re-express ``state`` in another chart (positions and velocities)."""
    target = Formulation(target)
    if target is state.formulation:
        return state
    c = state.curvature
    p, v = _extrinsic_from(state)
    if target is Formulation.EXTRINSIC:
        pos, vel = p, v
    elif target is Formulation.REDUCED:
        pos, vel = p[:, :2], v[:, :2]
    else:
        if c.kappa <= 0:
            raise DomainError(f"the {target.value} chart exists only on the sphere")
        big = geo.a_value(p)
        if (big <= codes.SINGULAR_THRESHOLD).any():
            raise PoleSingularity("a body sits at a pole; azimuth undefined")
        phi = np.arctan2(p[:, 1], p[:, 0])
        dphi = (p[:, 0] * v[:, 1] - p[:, 1] * v[:, 0]) / big
        if target is Formulation.CYLINDRICAL:
            pos = np.stack([phi, p[:, 2]], axis=1)
            vel = np.stack([dphi, v[:, 2]], axis=1)
        else:
            if not np.allclose(p[:, 2], -c.radius, atol=1e-9 * max(1.0, c.radius)) or not np.allclose(
                v[:, 2], 0.0, atol=1e-9
            ):
                raise DomainError("state is not on the equator")
            pos, vel = phi[:, None], dphi[:, None]
    return SystemState(c, state.masses, pos, vel, target, state.time, check=state.check)


def to_ambient(state: SystemState) -> tuple[np.ndarray, np.ndarray]:
    """Ambient positions and velocities, shape (N, 3) each."""
    return _extrinsic_from(state)


def pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))


def pair_distances(state: SystemState) -> np.ndarray:
    """Chord distances rho_ij for every pair i < j, ambient metric of the surface."""
    p, _ = _extrinsic_from(state)
    c = state.curvature
    out = []
    for i, j in pairs(state.n):
        out.append(np.sqrt(max(float(geo.chord_distance_sq(p[i], p[j], c)), 0.0)))
    return np.array(out)


def interacting_pairs(masses) -> list[tuple[int, int]]:
    """Pairs with at least one positive mass."""
    masses = np.asarray(masses)
    return [(i, j) for i, j in pairs(masses.size) if masses[i] > 0 or masses[j] > 0]


def rotate(state: SystemState, theta: float) -> SystemState:
    """Rigid rotation about the vertical axis."""
    f = state.formulation
    if f in (Formulation.CYLINDRICAL, Formulation.EQUATOR):
        pos = state.positions.copy()
        pos[:, 0] += theta
        return state.replace(positions=pos)
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    pos = state.positions.copy()
    vel = state.velocities.copy()
    pos[:, :2] = pos[:, :2] @ rot.T
    vel[:, :2] = vel[:, :2] @ rot.T
    return state.replace(positions=pos, velocities=vel)
