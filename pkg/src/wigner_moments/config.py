"""Flat ``key=value`` run configuration with dotted sections.

Example file::

    # bump experiment
    scenario = bump-tunneling
    cells = 400
    potential.kind = bump
    potential.width = 1.0

Keys match the long CLI flags without the leading dashes.  Lines may carry
``#`` comments.  Unknown keys are errors.  Resolution order is scenario
preset, then file, then flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidArgumentError
from .potential import KINDS, PotentialModel
from .solver import BOUNDARIES, Grid1D, SolverConfig


class ConfigError(InvalidArgumentError):
    """Bad configuration; ``key`` and ``line`` locate it when known."""

    def __init__(self, message, key=None, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.key = key
        self.line = line


def _float(text):
    value = float(text)
    if math.isnan(value):
        raise ValueError("nan")
    return value


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError(f"{text!r} is not an integer")
    return int(value)


def _bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"{text!r} is not a boolean")


def _floats(text):
    return tuple(_float(t) for t in str(text).split(",") if t.strip())


def _ints(text):
    return tuple(_int(t) for t in str(text).split(",") if t.strip())


SCENARIOS = ("equilibrium", "harmonic-classical", "bump-tunneling", "classical-steady")

SCHEMA = {
    "scenario": str,
    "order": _int,
    "cells": _int,
    "x-min": _float,
    "x-max": _float,
    "cfl": _float,
    "t-end": _float,
    "hbar": _float,
    "tau": _float,
    "boundary": str,
    "output-dir": str,
    "output-stride": _int,
    "seed": _int,
    "dimension": _int,
    "regularized": _bool,
    "plots": _bool,
    "potential.kind": str,
    "potential.amplitude": _float,
    "potential.width": _float,
    "potential.center": _float,
    "potential.k": _float,
    "potential.slope": _float,
    "potential.coefficients": _floats,
    "state.x": _float,
    "report.orders": _ints,
    "report.states": _int,
    "report.directions": _int,
    "asymptotics.times": _floats,
    "asymptotics.points": _int,
}

# state.* keys are checked against the selected order/dimension when used.
STATE_PREFIX = "state."

DEFAULTS = {
    "scenario": "equilibrium",
    "order": 3,
    "cells": 200,
    "x-min": -2.0,
    "x-max": 2.0,
    "cfl": 0.45,
    "t-end": 1.0,
    "hbar": 1.0,
    "tau": 1e6,
    "boundary": "periodic",
    "output-dir": "output",
    "output-stride": 1,
    "seed": 0,
    "dimension": 1,
    "regularized": True,
    "plots": True,
    "report.orders": (3, 4, 5, 6),
    "report.states": 10,
    "report.directions": 1,
    "asymptotics.times": (0.0025, 0.005, 0.05),
    "asymptotics.points": 401,
}

PRESETS = {
    "equilibrium": {"potential.kind": "zero", "boundary": "periodic", "t-end": 1.0},
    "harmonic-classical": {"potential.kind": "harmonic", "boundary": "zero-gradient", "t-end": 1.0},
    "bump-tunneling": {"potential.kind": "bump", "boundary": "zero-gradient", "hbar": 1.0,
                       "tau": 1e6, "cells": 200, "t-end": 0.05},
    "classical-steady": {"potential.kind": "bump", "boundary": "zero-gradient", "hbar": 0.0, "t-end": 1.0},
}


def convert(key, raw, line=None):
    if key.startswith(STATE_PREFIX):
        converter = _float
    elif key in SCHEMA:
        converter = SCHEMA[key]
    else:
        raise ConfigError(f"unknown configuration key {key!r}", key=key, line=line)
    if not isinstance(raw, str):
        return raw
    try:
        return converter(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}", key=key, line=line) from None


def parse_text(text):
    """Parse config text into a ``{key: value}`` dict (values converted)."""
    out = {}
    for number, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected key=value, got {body!r}", line=number)
        key, value = (part.strip() for part in body.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=number)
        out[key] = convert(key, value, line=number)
    return out


def parse_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_text(text)


@dataclass
class RunSettings:
    """Merged, validated settings; ``values`` is the full echo for manifests."""

    values: dict
    solver: SolverConfig
    grid: Grid1D
    potential: PotentialModel
    state_spec: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.values[key]


def build_potential(values):
    kind = values.get("potential.kind", "zero")
    if kind not in KINDS:
        raise ConfigError(f"potential.kind must be one of {KINDS}, got {kind!r}", key="potential.kind")
    params = {k.split(".", 1)[1]: v for k, v in values.items()
              if k.startswith("potential.") and k != "potential.kind"}
    if kind == "polynomial" and "coefficients" in params:
        params["coefficients"] = list(params["coefficients"])
    return PotentialModel(kind, params)


def resolve(file_values=None, overrides=None):
    """Merge defaults, scenario preset, file values and overrides, then validate."""
    file_values = dict(file_values or {})
    overrides = {k: convert(k, v) for k, v in (overrides or {}).items() if v is not None}
    scenario = overrides.get("scenario", file_values.get("scenario", DEFAULTS["scenario"]))
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}, got {scenario!r}", key="scenario")
    values = dict(DEFAULTS)
    values.update(PRESETS[scenario])
    if "potential.kind" in file_values or "potential.kind" in overrides:
        # a different kind must not inherit preset parameters of another kind
        values = {k: v for k, v in values.items() if not k.startswith("potential.")}
    values.update(file_values)
    values.update(overrides)
    values["scenario"] = scenario
    if values["boundary"] not in BOUNDARIES:
        raise ConfigError(f"boundary must be one of {BOUNDARIES}, got {values['boundary']!r}", key="boundary")
    if values["dimension"] not in (1, 3):
        raise ConfigError("dimension must be 1 or 3", key="dimension")
    if values["report.states"] < 1:
        raise ConfigError("report.states must be positive", key="report.states")
    for o in values["report.orders"]:
        if o < 3:
            raise ConfigError(f"report.orders entries must be >= 3, got {o}", key="report.orders")
    potential = build_potential(values)
    try:
        solver = SolverConfig(values["order"], values["cfl"], values["t-end"], values["hbar"],
                              values["tau"], potential, values["output-stride"])
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc), key=_key_for(str(exc))) from None
    try:
        grid = Grid1D(values["x-min"], values["x-max"], values["cells"], values["boundary"])
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc), key=_key_for(str(exc))) from None
    state_spec = {k[len(STATE_PREFIX):]: v for k, v in values.items() if k.startswith(STATE_PREFIX)}
    return RunSettings(values, solver, grid, potential, state_spec)


def _key_for(message):
    for key in ("output_stride", "order", "cfl", "t_end", "hbar", "tau", "cells", "x_max", "boundary"):
        if message.startswith(key):
            return key.replace("_", "-")
    return None
