"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CurvedNBodyError(Exception):
    """Base class for all package errors."""


class DomainError(CurvedNBodyError, ValueError):
    """An input lies outside the domain where a formula is defined."""


class SingularConfiguration(CurvedNBodyError):
    """Two interacting bodies collide or sit at antipodal points.

    ``pair`` holds zero-based body indices when known, ``time`` the
    simulation time at which the singularity was met (``None`` outside
    of an integration).
    """

    def __init__(self, message, pair=None, time=None):
        super().__init__(message)
        self.pair = pair
        self.time = time


class PoleSingularity(SingularConfiguration):
    """A body reached a pole, where the cylindrical chart breaks down."""


class ProjectionError(CurvedNBodyError):
    """A point is too far from the surface to be projected back onto it."""


class DriftAlarm(CurvedNBodyError):
    """Constraint residual exceeded the alarm threshold during integration."""

    def __init__(self, message, residual=None, time=None):
        super().__init__(message)
        self.residual = residual
        self.time = time
