"""
Constant-curvature surfaces embedded in R^3.

All three surfaces (sphere for kappa > 0, plane for kappa = 0, upper sheet
of the hyperboloid for kappa < 0) are tangent to the xy-plane at the
origin. Every function here accepts arrays whose last axis holds the
coordinates, so single points and batches go through the same code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, ProjectionError

ON_SURFACE_TOL = 1e-9
PROJECTION_MAX_RESIDUAL = 1e-3


@dataclass(frozen=True)
class Curvature:
    """Signed Gaussian curvature.

    ``exact`` keeps the rational value when the curvature was given as one,
    so the polynomial machinery can work without rounding.
    """

    kappa: float
    exact: Fraction | None = None

    def __post_init__(self):
        if not math.isfinite(self.kappa):
            raise DomainError(f"curvature must be finite, got {self.kappa!r}")

    @classmethod
    def of(cls, value) -> "Curvature":
        """Coerce a float, int, Fraction, ``"p/q"`` string or Curvature."""
        if isinstance(value, Curvature):
            return value
        if isinstance(value, str):
            value = Fraction(value.strip())
        if isinstance(value, (int, Fraction)):
            frac = Fraction(value)
            return cls(float(frac), frac)
        return cls(float(value), None)

    @property
    def sigma(self) -> int:
        return 1 if self.kappa >= 0 else -1

    @property
    def sqrt_abs(self) -> float:
        return math.sqrt(abs(self.kappa))

    @property
    def radius(self) -> float:
        """|kappa|^(-1/2); infinite for the plane."""
        return math.inf if self.kappa == 0 else 1.0 / self.sqrt_abs

    @property
    def center(self) -> np.ndarray:
        """Center of the sphere or hyperboloid, (0, 0, -|kappa|^(-1/2))."""
        if self.kappa == 0:
            raise DomainError("the plane has no center")
        return np.array([0.0, 0.0, -self.radius])

    def __float__(self):
        return self.kappa


def _metric(c: Curvature) -> np.ndarray:
    return np.array([1.0, 1.0, float(c.sigma)])


def inner(u, v, c) -> np.ndarray:
    """Euclidean (kappa >= 0) or Minkowski (kappa < 0) inner product."""
    c = Curvature.of(c)
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return np.sum(u * v * _metric(c), axis=-1)


def surface_constraint_residual(p, c):
    """kappa (x^2 + y^2 + sigma z^2) + 2 |kappa|^(1/2) z, or z when kappa = 0."""
    c = Curvature.of(c)
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    if c.kappa == 0:
        res = z
    else:
        res = c.kappa * (x * x + y * y + c.sigma * z * z) + 2.0 * c.sqrt_abs * z
    return res[()] if np.ndim(res) == 0 else res


def velocity_constraint_residual(p, v, c):
    """kappa <p, v>_sigma + |kappa|^(1/2) vz; the time derivative of the above, halved."""
    c = Curvature.of(c)
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if c.kappa == 0:
        res = v[..., 2]
    else:
        res = c.kappa * inner(p, v, c) + c.sqrt_abs * v[..., 2]
    return res[()] if np.ndim(res) == 0 else res


def chord_distance_sq(p, q, c):
    """Squared ambient chord; the z term carries sigma."""
    c = Curvature.of(c)
    d = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    res = inner(d, d, c)
    return res[()] if np.ndim(res) == 0 else res


def a_value(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p[..., 0] ** 2 + p[..., 1] ** 2


def z_from_xy(p, c):
    """Height of the surface branch through the origin above planar point ``p``."""
    c = Curvature.of(c)
    p = np.asarray(p, dtype=float)
    a = a_value(p)
    if c.kappa == 0:
        res = np.zeros_like(a)
    else:
        arg = 1.0 - c.kappa * a
        if np.any(arg < 0):
            raise DomainError(
                f"x^2 + y^2 exceeds 1/kappa = {1.0 / c.kappa:.6g}; no point on the sphere above it"
            )
        res = (np.sqrt(arg) - 1.0) / c.sqrt_abs
    return res[()] if np.ndim(res) == 0 else res


def rho_sq_reduced(p, q, c):
    """Squared chord between two lifted planar points, written without z."""
    c = Curvature.of(c)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    dx = p[..., 0] - q[..., 0]
    dy = p[..., 1] - q[..., 1]
    res = dx * dx + dy * dy
    if c.kappa != 0:
        ap, aq = a_value(p), a_value(q)
        wp, wq = 1.0 - c.kappa * ap, 1.0 - c.kappa * aq
        if np.any(wp < 0) or np.any(wq < 0):
            raise DomainError("planar point outside the disk x^2 + y^2 <= 1/kappa")
        res = res + c.kappa * (ap - aq) ** 2 / (np.sqrt(wp) + np.sqrt(wq)) ** 2
    return res[()] if np.ndim(res) == 0 else res


def lift(p, c) -> np.ndarray:
    """Planar point(s) to ambient point(s) on the surface."""
    p = np.asarray(p, dtype=float)
    z = np.asarray(z_from_xy(p, c), dtype=float)
    return np.concatenate([p[..., :2], z[..., None]], axis=-1)


def lift_velocity(p, v, c) -> np.ndarray:
    """Planar velocity to the tangent ambient velocity at ``lift(p)``."""
    c = Curvature.of(c)
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if c.kappa == 0:
        vz = np.zeros(p.shape[:-1])
    else:
        w = 1.0 - c.kappa * a_value(p)
        if np.any(w <= 0):
            raise DomainError("vertical velocity undefined on the equator rim 1 - kappa A = 0")
        pv = p[..., 0] * v[..., 0] + p[..., 1] * v[..., 1]
        vz = -(c.kappa / c.sqrt_abs) * pv / np.sqrt(w)
    return np.concatenate([v[..., :2], np.asarray(vz)[..., None]], axis=-1)


def project_to_surface(p, v, c, max_residual: float = PROJECTION_MAX_RESIDUAL):
    """Radial projection of ``p`` toward the surface center, then tangent ``v``.

    Returns ``(p, v)`` unchanged when both constraints already hold to
    round-off. Raises ProjectionError when ``p`` is further than
    ``max_residual`` (in constraint-residual units) from the surface.
    """
    c = Curvature.of(c)
    p = np.array(p, dtype=float)
    v = np.array(v, dtype=float)
    res = np.abs(np.asarray(surface_constraint_residual(p, c)))
    if np.any(res > max_residual):
        raise ProjectionError(
            f"point is {float(np.max(res)):.3g} (residual units) off the surface, "
            f"above the projection threshold {max_residual:g}"
        )
    if c.kappa == 0:
        p[..., 2] = 0.0
        v[..., 2] = 0.0
        return p, v
    if np.all(res == 0) and np.all(velocity_constraint_residual(p, v, c) == 0):
        return p, v

    q = p - c.center
    qq = inner(q, q, c)
    if np.any(qq * c.kappa <= 0) or (c.kappa < 0 and np.any(q[..., 2] <= 0)):
        raise ProjectionError("point is not on the surface's side of the center")
    q = q * np.sqrt((1.0 / c.kappa) / qq)[..., None]
    # <q, q> = 1/kappa after scaling
    v = v - (c.kappa * inner(v, q, c))[..., None] * q
    return q + c.center, v


def on_surface(p, c, tol: float = ON_SURFACE_TOL) -> bool:
    return bool(np.all(np.abs(np.asarray(surface_constraint_residual(p, c))) <= tol))
