"""Classical RK4 driver shared by both backends.

``make_advance`` closes over a backend's ``accel``, ``residual`` and
``project``; the numba backend jits the returned function, the numpy
backend runs it as plain Python.
"""

from ._codes import DRIFT, OK


def make_advance(accel, residual, project):
    def advance(code, pos, vel, m, kappa, thr, dt, nsteps, do_project,
                alarm, max_projection_residual, info, stats):
        """Take up to ``nsteps`` steps in place; return how many completed.

        On failure info[0] holds the status code. stats[0] accumulates
        the largest pre-projection residual seen.
        """
        a1 = pos * 0.0
        a2 = pos * 0.0
        a3 = pos * 0.0
        a4 = pos * 0.0
        h = 0.5 * dt
        for s in range(nsteps):
            st = accel(code, pos, vel, m, kappa, thr, a1, info)
            if st != OK:
                return s
            v2 = vel + h * a1
            st = accel(code, pos + h * vel, v2, m, kappa, thr, a2, info)
            if st != OK:
                return s
            v3 = vel + h * a2
            st = accel(code, pos + h * v2, v3, m, kappa, thr, a3, info)
            if st != OK:
                return s
            v4 = vel + dt * a3
            st = accel(code, pos + dt * v3, v4, m, kappa, thr, a4, info)
            if st != OK:
                return s
            pos += (dt / 6.0) * (vel + 2.0 * v2 + 2.0 * v3 + v4)
            vel += (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
            res = residual(code, pos, vel, kappa)
            if res > stats[0]:
                stats[0] = res
            if not res <= alarm:
                info[0] = DRIFT
                return s + 1
            if do_project:
                st = project(code, pos, vel, kappa, max_projection_residual)
                if st != OK:
                    info[0] = st
                    return s + 1
        return nsteps

    return advance
