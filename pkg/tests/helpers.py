"""Random valid states and independent transcriptions used as test oracles."""

import math

import numpy as np

from curved_nbody import Formulation, SystemState
from curved_nbody.geometry import Curvature, lift, lift_velocity


def well_separated(p, c, min_chord=0.3):
    n = len(p)
    for i in range(n):
        for j in range(i + 1, n):
            d = p[i] - p[j]
            r2 = d[0] ** 2 + d[1] ** 2 + (c.sigma * d[2] ** 2 if p.shape[1] == 3 else 0.0)
            if r2 < min_chord**2:
                return False
            if c.kappa > 0 and 1 - c.kappa * r2 / 4 < 0.05:
                return False
    return True


def random_reduced_state(rng, kappa, n=4, spread=None, vscale=0.5, masses=None, min_chord=0.3):
    """Planar state inside the chart, pairwise separated, random velocities."""
    c = Curvature.of(kappa)
    if spread is None:
        spread = 0.9 / math.sqrt(c.kappa) if c.kappa > 0 else 1.5
    m = rng.uniform(0.2, 1.5, n) if masses is None else np.asarray(masses, float)
    while True:
        rad = spread * np.sqrt(rng.uniform(0.02, 1.0, n))
        ang = rng.uniform(0, 2 * math.pi, n)
        p = np.stack([rad * np.cos(ang), rad * np.sin(ang)], axis=1)
        amb = lift(p, c) if c.kappa != 0 else np.concatenate([p, np.zeros((n, 1))], axis=1)
        if well_separated(amb, c, min_chord):
            break
    v = rng.normal(scale=vscale, size=(n, 2))
    return SystemState(c, m, p, v, Formulation.REDUCED)


def lifted(state):
    c = state.curvature
    return lift(state.positions, c), lift_velocity(state.positions, state.velocities, c)


def extrinsic_to_cylindrical_accel(p, v, a):
    """Chain rule: (phi'', omega'') from ambient position, velocity and acceleration."""
    x, y = p[:, 0], p[:, 1]
    vx, vy = v[:, 0], v[:, 1]
    big = x * x + y * y
    dbig = 2 * (x * vx + y * vy)
    dphi = (x * vy - y * vx) / big
    ddphi = (x * a[:, 1] - y * a[:, 0]) / big - dphi * dbig / big
    return np.stack([ddphi, a[:, 2]], axis=1)


def cylindrical_as_typeset(state):
    """The cylindrical system exactly as typeset, including its omega equation."""
    k = state.curvature.kappa
    sq = math.sqrt(k)
    rad = 1 / sq
    m = state.masses
    phi, om = state.positions[:, 0], state.positions[:, 1]
    dphi, dom = state.velocities[:, 0], state.velocities[:, 1]
    big = -rad * om * (sq * om + 2)
    dbig = -2 * rad * dom * (sq * om + 1)
    n = len(m)
    out = np.zeros((n, 2))
    for i in range(n):
        sphi = som = 0.0
        for j in range(n):
            if j == i or m[j] == 0:
                continue
            rho2 = (big[i] + big[j] - 2 * math.sqrt(big[i] * big[j]) * math.cos(phi[i] - phi[j])
                    + (om[i] - om[j]) ** 2)
            den = rho2**1.5 * (1 - k * rho2 / 4) ** 1.5
            sphi += m[j] * math.sqrt(big[j]) * math.sin(phi[j] - phi[i]) / den
            som += m[j] * (om[j] + om[i] + k * rho2 / 2 * (om[i] + rad)) / den
        out[i, 0] = sphi / math.sqrt(big[i]) - dphi[i] * dbig[i] / big[i]
        out[i, 1] = som / math.sqrt(big[i]) - (k * om[i] + sq) * (
            dbig[i] ** 2 / (4 * big[i]) + dphi[i] ** 2 * big[i] + dom[i] ** 2)
    return out


def extrinsic_accel_oracle(p, v, m, kappa):
    """Straight transcription of the ambient force law (center-shifted z term)."""
    c = Curvature.of(kappa)
    sig, sq = c.sigma, c.sqrt_abs
    n = len(m)
    out = np.zeros((n, 3))
    for i in range(n):
        vv = v[i, 0] ** 2 + v[i, 1] ** 2 + sig * v[i, 2] ** 2
        acc = np.zeros(3)
        for j in range(n):
            if j == i or m[j] == 0:
                continue
            d = p[i] - p[j]
            r2 = d[0] ** 2 + d[1] ** 2 + sig * d[2] ** 2
            den = r2**1.5 * (1 - kappa * r2 / 4) ** 1.5
            f = 1 - kappa * r2 / 2
            acc[0] += m[j] * (p[j, 0] - f * p[i, 0]) / den
            acc[1] += m[j] * (p[j, 1] - f * p[i, 1]) / den
            acc[2] += m[j] * (p[j, 2] - f * p[i, 2] + sig * sq * r2 / 2) / den
        out[i, 0] = acc[0] - kappa * vv * p[i, 0]
        out[i, 1] = acc[1] - kappa * vv * p[i, 1]
        out[i, 2] = acc[2] - (kappa * p[i, 2] + sig * sq) * vv
    return out


def close(a, b):
    """max |a - b| relative to max(1, |b|)."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))
