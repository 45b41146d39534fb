"""Loop kernels compiled with numba.

When numba is missing the decorator degrades to the identity, so this
module still imports; the dispatcher in ``kernels`` then prefers the
vectorized numpy backend instead of running these loops interpreted.
"""

import math

import numpy as np

from ._codes import (
    CYLINDRICAL,
    DOMAIN,
    EQUATOR,
    EXTRINSIC,
    NONFINITE,
    OK,
    POLE,
    PROJECTION,
    REDUCED,
    SINGULAR,
)
from ._rk4 import make_advance

try:
    import numba

    HAVE_NUMBA = True
    JIT_OPTIONS = {"nogil": True, "cache": True}

    def njit(fn):
        return numba.njit(**JIT_OPTIONS)(fn)

except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(fn):
        return fn


@njit
def _fail(info, code, i, j):
    info[0] = code
    info[1] = i
    info[2] = j
    return code


@njit
def _check_finite(out, info):
    n, d = out.shape
    for i in range(n):
        for k in range(d):
            if not math.isfinite(out[i, k]):
                return _fail(info, NONFINITE, i, -1)
    return OK


@njit
def accel_extrinsic(pos, vel, m, kappa, thr, out, info):
    n = pos.shape[0]
    sig = 1.0 if kappa >= 0 else -1.0
    sq = math.sqrt(abs(kappa))
    for i in range(n):
        xi, yi, zi = pos[i, 0], pos[i, 1], pos[i, 2]
        ax = 0.0
        ay = 0.0
        az = 0.0
        for j in range(n):
            if j == i or m[j] == 0.0:
                continue
            dx = xi - pos[j, 0]
            dy = yi - pos[j, 1]
            dz = zi - pos[j, 2]
            r2 = dx * dx + dy * dy + sig * dz * dz
            w = 1.0 - 0.25 * kappa * r2
            if r2 < thr * thr or w < thr:
                return _fail(info, SINGULAR, i, j)
            f = m[j] / (w * math.sqrt(w) * r2 * math.sqrt(r2))
            c = 1.0 - 0.5 * kappa * r2
            ax += f * (pos[j, 0] - c * xi)
            ay += f * (pos[j, 1] - c * yi)
            # shifted to the surface center, see dynamics.accel_extrinsic
            az += f * (pos[j, 2] - c * zi + 0.5 * sig * sq * r2)
        v2 = vel[i, 0] ** 2 + vel[i, 1] ** 2 + sig * vel[i, 2] ** 2
        out[i, 0] = ax - kappa * v2 * xi
        out[i, 1] = ay - kappa * v2 * yi
        out[i, 2] = az - v2 * (kappa * zi + sig * sq)
    return _check_finite(out, info)


@njit
def accel_reduced(pos, vel, m, kappa, thr, out, info):
    n = pos.shape[0]
    a = np.empty(n)
    sw = np.empty(n)
    for i in range(n):
        a[i] = pos[i, 0] ** 2 + pos[i, 1] ** 2
        w = 1.0 - kappa * a[i]
        if w <= 0.0:
            return _fail(info, DOMAIN, i, -1)
        sw[i] = math.sqrt(w)
    for i in range(n):
        xi, yi = pos[i, 0], pos[i, 1]
        ax = 0.0
        ay = 0.0
        for j in range(n):
            if j == i or m[j] == 0.0:
                continue
            dx = xi - pos[j, 0]
            dy = yi - pos[j, 1]
            s = sw[i] + sw[j]
            r2 = dx * dx + dy * dy + kappa * (a[i] - a[j]) ** 2 / (s * s)
            w = 1.0 - 0.25 * kappa * r2
            if r2 < thr * thr or w < thr:
                return _fail(info, SINGULAR, i, j)
            f = m[j] / (w * math.sqrt(w) * r2 * math.sqrt(r2))
            c = 1.0 - 0.5 * kappa * r2
            ax += f * (pos[j, 0] - c * xi)
            ay += f * (pos[j, 1] - c * yi)
        vx, vy = vel[i, 0], vel[i, 1]
        pv = xi * vx + yi * vy
        b = pv * pv / (sw[i] * sw[i])
        g = kappa * (vx * vx + vy * vy + kappa * b)
        out[i, 0] = ax - g * xi
        out[i, 1] = ay - g * yi
    return _check_finite(out, info)


@njit
def accel_cylindrical(pos, vel, m, kappa, thr, out, info):
    n = pos.shape[0]
    if kappa <= 0.0:
        return _fail(info, DOMAIN, -1, -1)
    sq = math.sqrt(kappa)
    rad = 1.0 / sq
    big = np.empty(n)
    for i in range(n):
        om = pos[i, 1]
        big[i] = -rad * om * (sq * om + 2.0)
        if big[i] <= thr:
            return _fail(info, POLE, i, -1)
    for i in range(n):
        phi_i, om_i = pos[i, 0], pos[i, 1]
        fphi = 0.0
        fom = 0.0
        for j in range(n):
            if j == i or m[j] == 0.0:
                continue
            dphi = pos[j, 0] - phi_i
            dom = om_i - pos[j, 1]
            r2 = big[i] + big[j] - 2.0 * math.sqrt(big[i] * big[j]) * math.cos(dphi) + dom * dom
            w = 1.0 - 0.25 * kappa * r2
            if r2 < thr * thr or w < thr:
                return _fail(info, SINGULAR, i, j)
            f = m[j] / (w * math.sqrt(w) * r2 * math.sqrt(r2))
            fphi += f * math.sqrt(big[j]) * math.sin(dphi)
            fom += f * (pos[j, 1] - om_i + 0.5 * kappa * r2 * (om_i + rad))
        dphi_i, dom_i = vel[i, 0], vel[i, 1]
        dbig = -2.0 * rad * dom_i * (sq * om_i + 1.0)
        v2 = dbig * dbig / (4.0 * big[i]) + dphi_i * dphi_i * big[i] + dom_i * dom_i
        out[i, 0] = fphi / math.sqrt(big[i]) - dphi_i * dbig / big[i]
        out[i, 1] = fom - (kappa * om_i + sq) * v2
    return _check_finite(out, info)


@njit
def accel_equator(pos, vel, m, kappa, thr, out, info):
    n = pos.shape[0]
    if kappa <= 0.0:
        return _fail(info, DOMAIN, -1, -1)
    k32 = kappa * math.sqrt(kappa)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            if j == i or m[j] == 0.0:
                continue
            s = math.sin(pos[j, 0] - pos[i, 0])
            if abs(s) < thr:
                return _fail(info, SINGULAR, i, j)
            acc += m[j] * s / (abs(s) ** 3)
        out[i, 0] = k32 * acc
    return _check_finite(out, info)


@njit
def accel(code, pos, vel, m, kappa, thr, out, info):
    if code == EXTRINSIC:
        return accel_extrinsic(pos, vel, m, kappa, thr, out, info)
    if code == REDUCED:
        return accel_reduced(pos, vel, m, kappa, thr, out, info)
    if code == CYLINDRICAL:
        return accel_cylindrical(pos, vel, m, kappa, thr, out, info)
    if code == EQUATOR:
        return accel_equator(pos, vel, m, kappa, thr, out, info)
    return _fail(info, DOMAIN, -1, -1)


@njit
def residual(code, pos, vel, kappa):
    """Largest constraint violation of the state in its own chart."""
    n = pos.shape[0]
    worst = 0.0
    if code == EXTRINSIC:
        sig = 1.0 if kappa >= 0 else -1.0
        sq = math.sqrt(abs(kappa))
        for i in range(n):
            x, y, z = pos[i, 0], pos[i, 1], pos[i, 2]
            vx, vy, vz = vel[i, 0], vel[i, 1], vel[i, 2]
            if kappa == 0.0:
                rp = z
                rv = vz
            else:
                rp = kappa * (x * x + y * y + sig * z * z) + 2.0 * sq * z
                rv = kappa * (x * vx + y * vy + sig * z * vz) + sq * vz
            worst = max(worst, abs(rp), abs(rv))
    elif code == REDUCED:
        if kappa != 0.0:
            sig = 1.0 if kappa >= 0 else -1.0
            sq = math.sqrt(abs(kappa))
            for i in range(n):
                a = pos[i, 0] ** 2 + pos[i, 1] ** 2
                w = 1.0 - kappa * a
                if w < 0.0:
                    return math.inf
                z = (math.sqrt(w) - 1.0) / sq
                worst = max(worst, abs(kappa * (a + sig * z * z) + 2.0 * sq * z))
    elif code == CYLINDRICAL:
        rad = 1.0 / math.sqrt(kappa)
        for i in range(n):
            if pos[i, 1] > 0.0 or pos[i, 1] < -2.0 * rad:
                return math.inf
    return worst


@njit
def project(code, pos, vel, kappa, max_residual):
    """Pull an extrinsic state back onto the surface; other charts are exact."""
    if code != EXTRINSIC:
        return OK
    n = pos.shape[0]
    if kappa == 0.0:
        for i in range(n):
            pos[i, 2] = 0.0
            vel[i, 2] = 0.0
        return OK
    sig = 1.0 if kappa >= 0 else -1.0
    sq = math.sqrt(abs(kappa))
    rad = 1.0 / sq
    for i in range(n):
        x, y, z = pos[i, 0], pos[i, 1], pos[i, 2]
        rp = kappa * (x * x + y * y + sig * z * z) + 2.0 * sq * z
        if abs(rp) > max_residual:
            return PROJECTION
        qz = z + rad
        qq = x * x + y * y + sig * qz * qz
        if qq * kappa <= 0.0 or (kappa < 0 and qz <= 0.0):
            return PROJECTION
        s = math.sqrt(1.0 / (kappa * qq))
        x *= s
        y *= s
        qz *= s
        vq = kappa * (vel[i, 0] * x + vel[i, 1] * y + sig * vel[i, 2] * qz)
        vel[i, 0] -= vq * x
        vel[i, 1] -= vq * y
        vel[i, 2] -= vq * qz
        pos[i, 0] = x
        pos[i, 1] = y
        pos[i, 2] = qz - rad
    return OK


advance = njit(make_advance(accel, residual, project))
