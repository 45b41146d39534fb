"""
JSON scenario files for ``curved-nbody simulate``.

A scenario looks like::

    {
      "curvature": "1",
      "formulation": "reduced",
      "bodies": [{"mass": 1.0, "position": [0.8, 0.0], "velocity": [0.0, 1.2]}, ...],
      "integrator": {"dt": 1e-4, "steps": 81340, "projection": false, "drift_alarm": 1e-6},
      "outputs": {"trajectory": "run.csv", "report": "run.json", "record_stride": 100}
    }

Curvature is a ``"p/q"`` string (kept exact) or a decimal. Output paths
are resolved against the scenario file's directory. Every validation
failure raises ScenarioError naming the offending field, plus line and
column when the JSON itself is malformed.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .dynamics import MAX_BODIES, MIN_BODIES, Formulation, SystemState
from .errors import CurvedNBodyError, DomainError
from .geometry import Curvature
from .integrate import IntegratorConfig

TOP_KEYS = {"curvature", "formulation", "bodies", "integrator", "outputs", "name", "description"}
BODY_KEYS = {"mass", "position", "velocity"}
INTEGRATOR_KEYS = {"dt", "steps", "projection", "drift_alarm", "max_projection_residual"}
OUTPUT_KEYS = {"trajectory", "report", "record_stride"}


class ScenarioError(CurvedNBodyError):
    """Malformed or invalid scenario; ``field`` is a path like ``bodies[2].mass``."""

    def __init__(self, message, field=None, line=None, column=None, source=None):
        self.field = field
        self.line = line
        self.column = column
        self.source = source
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}, column {column}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{': '.join(where)}: {message}" if where else message)

    def to_dict(self) -> dict:
        return {
            "error": "scenario",
            "message": str(self),
            "field": self.field,
            "line": self.line,
            "column": self.column,
        }


@dataclass(frozen=True)
class Outputs:
    trajectory: Path | None
    report: Path | None
    record_stride: int = 1


@dataclass(frozen=True)
class Scenario:
    curvature: Curvature
    formulation: Formulation
    masses: list[float]
    positions: list[list[float]]
    velocities: list[list[float]]
    integrator: IntegratorConfig
    outputs: Outputs
    name: str | None = None
    source: Path | None = None

    def initial_state(self) -> SystemState:
        return SystemState(self.curvature, self.masses, self.positions, self.velocities, self.formulation)

    def curvature_record(self) -> dict:
        c = self.curvature
        return {"value": c.kappa, "exact": None if c.exact is None else str(c.exact)}


def _line_of(text: str, key: str) -> tuple[int | None, int | None]:
    """Best-effort location of the first ``"key"`` in the raw text."""
    if text is None:
        return None, None
    idx = text.find(f'"{key}"')
    if idx < 0:
        return None, None
    line = text.count("\n", 0, idx) + 1
    col = idx - (text.rfind("\n", 0, idx) + 1) + 1
    return line, col


class _Reader:
    def __init__(self, text, source):
        self.text = text
        self.source = source

    def fail(self, message, field):
        leaf = field.rsplit(".", 1)[-1].split("[", 1)[0] if field else None
        line, col = _line_of(self.text, leaf) if leaf else (None, None)
        raise ScenarioError(message, field=field, line=line, column=col, source=self.source)

    def obj(self, value, field, allowed, required=()):
        if not isinstance(value, dict):
            self.fail(f"expected an object, got {type(value).__name__}", field)
        extra = sorted(set(value) - allowed)
        if extra:
            self.fail(f"unknown key(s) {extra}; allowed: {sorted(allowed)}", f"{field}.{extra[0]}" if field else extra[0])
        for k in required:
            if k not in value:
                self.fail("missing required key", f"{field}.{k}" if field else k)
        return value

    def number(self, value, field, positive=False, nonnegative=False):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"expected a number, got {value!r}", field)
        v = float(value)
        if not math.isfinite(v):
            self.fail("must be finite", field)
        if positive and not v > 0:
            self.fail("must be positive", field)
        if nonnegative and v < 0:
            self.fail("must be nonnegative", field)
        return v

    def integer(self, value, field, minimum=0):
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(f"expected an integer, got {value!r}", field)
        if value < minimum:
            self.fail(f"must be at least {minimum}", field)
        return value

    def vector(self, value, field, dim):
        if dim == 1 and not isinstance(value, list):
            value = [value]
        if not isinstance(value, list) or len(value) != dim:
            self.fail(f"expected a list of {dim} numbers", field)
        return [self.number(x, f"{field}[{i}]") for i, x in enumerate(value)]


def parse_curvature(value, field="curvature", reader=None) -> Curvature:
    """``"p/q"`` and integer strings stay exact; numbers and decimal strings become floats."""
    try:
        if isinstance(value, bool):
            raise TypeError
        if isinstance(value, str):
            s = value.strip()
            if "/" in s or s.lstrip("+-").isdigit():
                return Curvature.of(Fraction(s))
            return Curvature.of(float(s))
        if isinstance(value, int):
            return Curvature.of(value)
        if isinstance(value, float):
            return Curvature.of(value)
        raise TypeError
    except (TypeError, ValueError, ZeroDivisionError, DomainError):
        msg = f"curvature must be 'p/q' or a decimal, got {value!r}"
        if reader is not None:
            reader.fail(msg, field)
        raise ScenarioError(msg, field=field)


def _writable(path: Path) -> bool:
    d = path.parent
    while not d.exists():
        if d.parent == d:
            return False
        d = d.parent
    return d.is_dir() and os.access(d, os.W_OK)


def scenario_from_dict(data, source: Path | None = None, text: str | None = None) -> Scenario:
    rd = _Reader(text, source)
    rd.obj(data, "", TOP_KEYS, required=("curvature", "formulation", "bodies", "integrator"))
    c = parse_curvature(data["curvature"], reader=rd)
    try:
        form = Formulation(data["formulation"])
    except ValueError:
        rd.fail(f"unknown formulation {data['formulation']!r}; choose from {[f.value for f in Formulation]}",
                "formulation")

    bodies = data["bodies"]
    if not isinstance(bodies, list) or not MIN_BODIES <= len(bodies) <= MAX_BODIES:
        rd.fail(f"expected a list of {MIN_BODIES}..{MAX_BODIES} bodies", "bodies")
    masses, positions, velocities = [], [], []
    for i, b in enumerate(bodies):
        f = f"bodies[{i}]"
        rd.obj(b, f, BODY_KEYS, required=tuple(sorted(BODY_KEYS)))
        masses.append(rd.number(b["mass"], f"{f}.mass", nonnegative=True))
        positions.append(rd.vector(b["position"], f"{f}.position", form.dim))
        velocities.append(rd.vector(b["velocity"], f"{f}.velocity", form.dim))

    integ = rd.obj(data["integrator"], "integrator", INTEGRATOR_KEYS, required=("dt", "steps"))
    outs = rd.obj(data.get("outputs", {}), "outputs", OUTPUT_KEYS)
    stride = rd.integer(outs.get("record_stride", 1), "outputs.record_stride", minimum=1)
    kw = {
        "dt": rd.number(integ["dt"], "integrator.dt", positive=True),
        "steps": rd.integer(integ["steps"], "integrator.steps"),
        "record_stride": stride,
    }
    if "projection" in integ:
        if not isinstance(integ["projection"], bool):
            rd.fail("expected true or false", "integrator.projection")
        kw["projection"] = integ["projection"]
    if "drift_alarm" in integ:
        kw["drift_alarm"] = rd.number(integ["drift_alarm"], "integrator.drift_alarm", positive=True)
    if "max_projection_residual" in integ:
        kw["max_projection_residual"] = rd.number(
            integ["max_projection_residual"], "integrator.max_projection_residual", positive=True
        )
    cfg = IntegratorConfig(**kw)

    base = source.parent if source is not None else Path.cwd()
    paths = {}
    for key in ("trajectory", "report"):
        v = outs.get(key)
        if v is None:
            paths[key] = None
            continue
        if not isinstance(v, str) or not v:
            rd.fail("expected a file path string", f"outputs.{key}")
        p = Path(v)
        p = p if p.is_absolute() else base / p
        if not _writable(p):
            rd.fail(f"directory of {str(p)!r} is not writable", f"outputs.{key}")
        paths[key] = p

    name = data.get("name")
    sc = Scenario(c, form, masses, positions, velocities, cfg,
                  Outputs(paths["trajectory"], paths["report"], stride), name, source)
    try:
        sc.initial_state()
    except DomainError as exc:
        rd.fail(str(exc), "bodies")
    return sc


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", source=path) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(exc.msg, line=exc.lineno, column=exc.colno, source=path) from exc
    return scenario_from_dict(data, source=path, text=text)


def scenario_dict(curvature: str, formulation: str, masses, positions, velocities, dt: float,
                  steps: int, outputs: dict, projection: bool = False, drift_alarm: float = 1e-6,
                  name: str | None = None) -> dict:
    """Build the JSON-ready dictionary ``load_scenario`` accepts."""
    d = {}
    if name:
        d["name"] = name
    d.update({
        "curvature": curvature,
        "formulation": formulation,
        "bodies": [
            {"mass": float(m), "position": [float(x) for x in p], "velocity": [float(x) for x in v]}
            for m, p, v in zip(masses, positions, velocities)
        ],
        "integrator": {"dt": dt, "steps": int(steps), "projection": projection, "drift_alarm": drift_alarm},
        "outputs": outputs,
    })
    return d
