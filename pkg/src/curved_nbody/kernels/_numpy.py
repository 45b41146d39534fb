"""Vectorized numpy kernels: same signatures and status codes as ``_numba``.

Each evaluator builds (N, N) pair arrays and masks out the diagonal and
the pairs whose source mass is zero, so a massless body contributes
exact zeros to everyone else's sums.
"""

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


def _fail(info, code, i=-1, j=-1):
    info[0] = code
    info[1] = i
    info[2] = j
    return code


def _active(m):
    n = m.shape[0]
    return (m[None, :] != 0.0) & ~np.eye(n, dtype=bool)


def _pair_factor(r2, kappa, thr, mask, m, info):
    """m_j / ((1 - kappa r^2/4)^(3/2) r^3) on active pairs, else 0; None on singularity."""
    w = 1.0 - 0.25 * kappa * r2
    bad = mask & ((r2 < thr * thr) | (w < thr))
    if bad.any():
        i, j = np.argwhere(bad)[0]
        _fail(info, SINGULAR, int(i), int(j))
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        f = m[None, :] / (w * np.sqrt(w) * r2 * np.sqrt(r2))
    return np.where(mask, f, 0.0)


def _finish(out, info):
    if not np.isfinite(out).all():
        i = int(np.argwhere(~np.isfinite(out))[0, 0])
        return _fail(info, NONFINITE, i)
    return OK


def accel_extrinsic(pos, vel, m, kappa, thr, out, info):
    sig = 1.0 if kappa >= 0 else -1.0
    sq = np.sqrt(abs(kappa))
    mask = _active(m)
    d = pos[:, None, :] - pos[None, :, :]
    r2 = d[..., 0] ** 2 + d[..., 1] ** 2 + sig * d[..., 2] ** 2
    f = _pair_factor(r2, kappa, thr, mask, m, info)
    if f is None:
        return info[0]
    c = 1.0 - 0.5 * kappa * r2
    num = pos[None, :, :] - c[..., None] * pos[:, None, :]
    num[..., 2] += 0.5 * sig * sq * r2
    force = np.sum(f[..., None] * num, axis=1)
    v2 = vel[:, 0] ** 2 + vel[:, 1] ** 2 + sig * vel[:, 2] ** 2
    out[:, 0] = force[:, 0] - kappa * v2 * pos[:, 0]
    out[:, 1] = force[:, 1] - kappa * v2 * pos[:, 1]
    out[:, 2] = force[:, 2] - v2 * (kappa * pos[:, 2] + sig * sq)
    return _finish(out, info)


def accel_reduced(pos, vel, m, kappa, thr, out, info):
    a = pos[:, 0] ** 2 + pos[:, 1] ** 2
    w = 1.0 - kappa * a
    if (w <= 0.0).any():
        return _fail(info, DOMAIN, int(np.argmax(w <= 0.0)))
    sw = np.sqrt(w)
    mask = _active(m)
    d = pos[:, None, :] - pos[None, :, :]
    s = sw[:, None] + sw[None, :]
    r2 = d[..., 0] ** 2 + d[..., 1] ** 2 + kappa * (a[:, None] - a[None, :]) ** 2 / (s * s)
    f = _pair_factor(r2, kappa, thr, mask, m, info)
    if f is None:
        return info[0]
    c = 1.0 - 0.5 * kappa * r2
    num = pos[None, :, :] - c[..., None] * pos[:, None, :]
    force = np.sum(f[..., None] * num, axis=1)
    pv = pos[:, 0] * vel[:, 0] + pos[:, 1] * vel[:, 1]
    g = kappa * (vel[:, 0] ** 2 + vel[:, 1] ** 2 + kappa * pv * pv / w)
    out[:, :] = force - g[:, None] * pos
    return _finish(out, info)


def accel_cylindrical(pos, vel, m, kappa, thr, out, info):
    if kappa <= 0.0:
        return _fail(info, DOMAIN)
    sq = np.sqrt(kappa)
    rad = 1.0 / sq
    phi, om = pos[:, 0], pos[:, 1]
    big = -rad * om * (sq * om + 2.0)
    if (big <= thr).any():
        return _fail(info, POLE, int(np.argmax(big <= thr)))
    mask = _active(m)
    dphi = phi[None, :] - phi[:, None]
    dom = om[:, None] - om[None, :]
    root = np.sqrt(big)
    r2 = big[:, None] + big[None, :] - 2.0 * np.outer(root, root) * np.cos(dphi) + dom**2
    f = _pair_factor(r2, kappa, thr, mask, m, info)
    if f is None:
        return info[0]
    fphi = np.sum(f * root[None, :] * np.sin(dphi), axis=1)
    fom = np.sum(f * (om[None, :] - om[:, None] + 0.5 * kappa * r2 * (om[:, None] + rad)), axis=1)
    dphi_i, dom_i = vel[:, 0], vel[:, 1]
    dbig = -2.0 * rad * dom_i * (sq * om + 1.0)
    v2 = dbig**2 / (4.0 * big) + dphi_i**2 * big + dom_i**2
    out[:, 0] = fphi / root - dphi_i * dbig / big
    out[:, 1] = fom - (kappa * om + sq) * v2
    return _finish(out, info)


def accel_equator(pos, vel, m, kappa, thr, out, info):
    if kappa <= 0.0:
        return _fail(info, DOMAIN)
    mask = _active(m)
    s = np.sin(pos[None, :, 0] - pos[:, None, 0])
    bad = mask & (np.abs(s) < thr)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        return _fail(info, SINGULAR, int(i), int(j))
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(mask, m[None, :] * s / np.abs(s) ** 3, 0.0)
    out[:, 0] = kappa ** 1.5 * np.sum(terms, axis=1)
    return _finish(out, info)


_EVALUATORS = {
    EXTRINSIC: accel_extrinsic,
    REDUCED: accel_reduced,
    CYLINDRICAL: accel_cylindrical,
    EQUATOR: accel_equator,
}


def accel(code, pos, vel, m, kappa, thr, out, info):
    return _EVALUATORS[code](pos, vel, m, kappa, thr, out, info)


def residual(code, pos, vel, kappa):
    if code == EXTRINSIC:
        x, y, z = pos[:, 0], pos[:, 1], pos[:, 2]
        if kappa == 0.0:
            return float(max(np.abs(z).max(), np.abs(vel[:, 2]).max()))
        sig = 1.0 if kappa >= 0 else -1.0
        sq = np.sqrt(abs(kappa))
        rp = kappa * (x * x + y * y + sig * z * z) + 2.0 * sq * z
        rv = kappa * (x * vel[:, 0] + y * vel[:, 1] + sig * z * vel[:, 2]) + sq * vel[:, 2]
        return float(max(np.abs(rp).max(), np.abs(rv).max()))
    if code == REDUCED:
        if kappa == 0.0:
            return 0.0
        a = pos[:, 0] ** 2 + pos[:, 1] ** 2
        w = 1.0 - kappa * a
        if (w < 0.0).any():
            return np.inf
        sig = 1.0 if kappa >= 0 else -1.0
        sq = np.sqrt(abs(kappa))
        z = (np.sqrt(w) - 1.0) / sq
        return float(np.abs(kappa * (a + sig * z * z) + 2.0 * sq * z).max())
    if code == CYLINDRICAL:
        rad = 1.0 / np.sqrt(kappa)
        om = pos[:, 1]
        return np.inf if ((om > 0.0) | (om < -2.0 * rad)).any() else 0.0
    return 0.0


def project(code, pos, vel, kappa, max_residual):
    if code != EXTRINSIC:
        return OK
    if kappa == 0.0:
        pos[:, 2] = 0.0
        vel[:, 2] = 0.0
        return OK
    sig = 1.0 if kappa >= 0 else -1.0
    sq = np.sqrt(abs(kappa))
    rad = 1.0 / sq
    x, y, z = pos[:, 0], pos[:, 1], pos[:, 2]
    rp = kappa * (x * x + y * y + sig * z * z) + 2.0 * sq * z
    if (np.abs(rp) > max_residual).any():
        return PROJECTION
    q = pos.copy()
    q[:, 2] += rad
    qq = q[:, 0] ** 2 + q[:, 1] ** 2 + sig * q[:, 2] ** 2
    if (qq * kappa <= 0.0).any() or (kappa < 0 and (q[:, 2] <= 0.0).any()):
        return PROJECTION
    q *= np.sqrt(1.0 / (kappa * qq))[:, None]
    vq = kappa * (vel[:, 0] * q[:, 0] + vel[:, 1] * q[:, 1] + sig * vel[:, 2] * q[:, 2])
    vel -= vq[:, None] * q
    q[:, 2] -= rad
    pos[:, :] = q
    return OK


advance = make_advance(accel, residual, project)
