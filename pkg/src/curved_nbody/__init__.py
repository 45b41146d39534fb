"""
Gravitational N-body dynamics on surfaces of constant curvature.

Bodies move on the sphere (kappa > 0), the hyperbolic sphere (kappa < 0)
or, as a limit, the plane, under the curved analogue of Newton's law.
Subpackages:

* ``geometry``: curvature, surface constraints, chord distances, charts
* ``dynamics``: states and the four equivalent force evaluators
* ``integrate``: fixed-step RK4 with projection and drift monitoring
* ``equilibria``: square, kite and equatorial relative equilibria
* ``polyroot``: exact rational polynomials and root isolation
"""

__version__ = "0.1.0"

from .dynamics import (  # noqa: E402
    Formulation,
    SystemState,
    accel_cylindrical,
    accel_equator,
    accel_extrinsic,
    accel_reduced,
    accelerations,
    convert,
    pair_distances,
)
from .errors import (  # noqa: E402
    CurvedNBodyError,
    DomainError,
    DriftAlarm,
    PoleSingularity,
    ProjectionError,
    SingularConfiguration,
)
from .geometry import Curvature  # noqa: E402
from .integrate import IntegratorConfig, Trajectory, distance_drift, propagate, step  # noqa: E402

__all__ = [
    "Curvature",
    "CurvedNBodyError",
    "DomainError",
    "DriftAlarm",
    "Formulation",
    "IntegratorConfig",
    "PoleSingularity",
    "ProjectionError",
    "SingularConfiguration",
    "SystemState",
    "Trajectory",
    "accel_cylindrical",
    "accel_equator",
    "accel_extrinsic",
    "accel_reduced",
    "accelerations",
    "convert",
    "distance_drift",
    "pair_distances",
    "propagate",
    "step",
]
