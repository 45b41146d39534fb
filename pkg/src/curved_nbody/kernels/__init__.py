"""Backend selection for the hot numeric kernels.

Two interchangeable backends expose ``accel``, ``residual``, ``project``
and ``advance`` with identical signatures:

* ``numba``: explicit loops compiled with ``numba.njit`` (default when
  numba imports),
* ``numpy``: vectorized pair arrays, no compilation.

Set ``CURVED_NBODY_BACKEND=numpy`` (or ``numba``) to choose at import time;
``get_backend(name)`` returns either one explicitly.
"""

from __future__ import annotations

import logging
import os
from types import ModuleType

from . import _numpy
from ._codes import (  # noqa: F401
    CYLINDRICAL,
    DOMAIN,
    DRIFT,
    EQUATOR,
    EXTRINSIC,
    NONFINITE,
    OK,
    POLE,
    PROJECTION,
    REDUCED,
    SINGULAR,
    SINGULAR_THRESHOLD,
)

BACKEND_ENV = "CURVED_NBODY_BACKEND"

log = logging.getLogger(__name__)

try:
    from . import _numba
except Exception as exc:  # pragma: no cover
    log.debug("numba backend unavailable: %s", exc)
    _numba = None

_BACKENDS: dict[str, ModuleType | None] = {"numba": _numba, "numpy": _numpy}


def available_backends() -> list[str]:
    return [
        name
        for name, mod in _BACKENDS.items()
        if mod is not None and (name != "numba" or mod.HAVE_NUMBA)
    ]


def get_backend(name: str | None = None) -> ModuleType:
    if name is None:
        name = os.environ.get(BACKEND_ENV, "").strip().lower() or (
            "numba" if "numba" in available_backends() else "numpy"
        )
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose from {sorted(_BACKENDS)}")
    if name not in available_backends():
        raise RuntimeError(f"backend {name!r} is not available (is numba installed?)")
    return _BACKENDS[name]
