"""Fixed-step RK4 propagation with optional projection and drift monitoring."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    Formulation,
    SystemState,
    convert,
    interacting_pairs,
    pair_distances,
    pairs,
    raise_for_status,
)
from .errors import DomainError, DriftAlarm
from .geometry import PROJECTION_MAX_RESIDUAL
from .kernels import DRIFT, OK, SINGULAR_THRESHOLD, get_backend

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    steps: int
    projection: bool = False
    drift_alarm: float = 1e-6
    record_stride: int = 1
    max_projection_residual: float = PROJECTION_MAX_RESIDUAL
    singular_threshold: float = SINGULAR_THRESHOLD

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")
        if int(self.steps) != self.steps or self.steps < 0:
            raise DomainError(f"steps must be a nonnegative integer, got {self.steps}")
        if not self.drift_alarm > 0:
            raise DomainError(f"drift alarm threshold must be positive, got {self.drift_alarm}")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise DomainError(f"record stride must be a positive integer, got {self.record_stride}")


@dataclass
class Trajectory:
    """Recorded snapshots of one propagation.

    ``distances[k, p]`` is rho for ``pair_index[p]`` at ``times[k]``;
    ``residuals[k]`` is the largest constraint violation of snapshot k and
    ``max_step_residual`` the largest one seen before any projection.
    """

    curvature: object
    formulation: Formulation
    masses: np.ndarray
    times: list = field(default_factory=list)
    positions: list = field(default_factory=list)
    velocities: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    distances: list = field(default_factory=list)
    max_step_residual: float = 0.0

    @property
    def pair_index(self) -> list[tuple[int, int]]:
        return pairs(len(self.masses))

    def __len__(self):
        return len(self.times)

    def append(self, state: SystemState, residual: float):
        self.times.append(state.time)
        self.positions.append(np.array(state.positions))
        self.velocities.append(np.array(state.velocities))
        self.residuals.append(residual)
        self.distances.append(pair_distances(state))

    def state(self, k: int) -> SystemState:
        return SystemState(
            self.curvature, self.masses, self.positions[k], self.velocities[k],
            self.formulation, self.times[k], check=False,
        )

    def as_arrays(self) -> dict[str, np.ndarray]:
        return {
            "times": np.asarray(self.times),
            "positions": np.asarray(self.positions),
            "velocities": np.asarray(self.velocities),
            "residuals": np.asarray(self.residuals),
            "distances": np.asarray(self.distances),
        }


def _prepare(state: SystemState, formulation) -> SystemState:
    if formulation is not None and Formulation(formulation) is not state.formulation:
        state = convert(state, formulation)
    return state


def _run(be, state, cfg, nsteps, pos, vel, info, stats):
    return be.advance(
        state.formulation.code, pos, vel, np.array(state.masses), state.curvature.kappa,
        cfg.singular_threshold, cfg.dt, nsteps, cfg.projection, cfg.drift_alarm,
        cfg.max_projection_residual, info, stats,
    )


def step(state: SystemState, dt: float, formulation=None, projection: bool = False,
         backend=None) -> SystemState:
    """One RK4 step; the result is expressed in ``formulation`` (default: the state's)."""
    state = _prepare(state, formulation)
    cfg = IntegratorConfig(dt=dt, steps=1, projection=projection, drift_alarm=np.inf)
    be = get_backend(backend)
    pos = np.array(state.positions)
    vel = np.array(state.velocities)
    info = np.zeros(3, dtype=np.int64)
    stats = np.zeros(1)
    _run(be, state, cfg, 1, pos, vel, info, stats)
    raise_for_status(info, time=state.time)
    return state.replace(positions=pos, velocities=vel, time=state.time + dt, check=False)


def propagate(state: SystemState, cfg: IntegratorConfig, formulation=None,
              backend=None) -> Trajectory:
    """Run ``cfg.steps`` steps, recording every ``record_stride``-th state.

    The initial state is always recorded, and so is the final one when
    ``steps`` is not a multiple of the stride. Raises DriftAlarm or
    SingularConfiguration with the failure time; the partial trajectory is
    attached to the exception as ``trajectory``.
    """
    state = _prepare(state, formulation)
    be = get_backend(backend)
    traj = Trajectory(state.curvature, state.formulation, np.array(state.masses))
    code = state.formulation.code
    kappa = state.curvature.kappa
    pos = np.array(state.positions)
    vel = np.array(state.velocities)
    traj.append(state, float(be.residual(code, pos, vel, kappa)))

    info = np.zeros(3, dtype=np.int64)
    stats = np.zeros(1)
    done_total = 0
    t0 = state.time
    while done_total < cfg.steps:
        chunk = min(cfg.record_stride, cfg.steps - done_total)
        done = int(_run(be, state, cfg, chunk, pos, vel, info, stats))
        done_total += done
        t = t0 + done_total * cfg.dt
        traj.max_step_residual = float(stats[0])
        if info[0] != OK:
            try:
                if info[0] == DRIFT:
                    raise DriftAlarm(
                        f"constraint residual {stats[0]:.3e} exceeded alarm {cfg.drift_alarm:g} at t={t:.12g}",
                        residual=float(stats[0]),
                        time=t,
                    )
                raise_for_status(info, time=t)
            except Exception as exc:
                exc.trajectory = traj
                raise
        snap = state.replace(positions=pos, velocities=vel, time=t, check=False)
        traj.append(snap, float(be.residual(code, pos, vel, kappa)))
    log.debug("propagated %d steps, %d snapshots", done_total, len(traj))
    return traj


def distance_drift(traj: Trajectory, which=None) -> float:
    """Largest |rho_ij(t) - rho_ij(0)| over snapshots and pairs.

    ``which`` selects pairs; by default the interacting ones (at least one
    positive mass).
    """
    if len(traj) < 2:
        return 0.0
    index = traj.pair_index
    chosen = interacting_pairs(traj.masses) if which is None else list(which)
    cols = [index.index(tuple(p)) for p in chosen]
    if not cols:
        return 0.0
    d = np.asarray(traj.distances)[:, cols]
    return float(np.max(np.abs(d - d[0])))


def reverse(state: SystemState) -> SystemState:
    """Same configuration with velocities negated."""
    return state.replace(velocities=-np.asarray(state.velocities))
