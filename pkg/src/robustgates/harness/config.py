"""Sweep configuration: JSON schema, validation and defaults.

A config file looks like::

    {
      "schema_version": 1,
      "experiment": "fidelity-sweep",
      "families": ["naive", "BB1"],
      "theta": 1.5707963267948966,
      "error": {"f_min": -1.0, "f_max": 1.0, "f_step": 0.01, "g": 0.0, "epsilon": 0.0},
      "output": {"path": "fidelity.csv", "format": "csv"}
    }

Experiment specific blocks (``counting``, ``multiplet``) and ``spin_system``
are optional; see README.md for the full list of keys.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .. import coupling as cp
from ..pulses import FAMILIES

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "ROBUSTGATES_OUTPUT_DIR"

EXPERIMENTS = ("excitation-profile", "fidelity-sweep", "counting", "coupling-multiplet", "simplify-demo")
F_RANGE = (-1.0, 2.0)
MAX_GRID_POINTS = 100_000


class ConfigError(ValueError):
    """Invalid sweep configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class ErrorGrid:
    f_min: float = -1.0
    f_max: float = 1.0
    f_step: float = 0.01
    g: float = 0.0
    epsilon: float = 0.0

    def values(self) -> list[float]:
        """Grid points ``f_min + i * f_step``, end point included when on-grid."""
        count = int(math.floor((self.f_max - self.f_min) / self.f_step + 1e-9)) + 1
        # round away binary noise so grids print as the user wrote them
        return [round(self.f_min + i * self.f_step, 12) for i in range(count)]


@dataclass(frozen=True)
class SweepSpec:
    experiment: str
    families: tuple[str, ...]
    theta: float = math.pi / 2
    phi: float = 0.0
    grid: ErrorGrid = field(default_factory=ErrorGrid)
    spin_system: cp.SpinSystem | None = None
    k: int = 1
    r_max: int = 20
    single_family: str = "naive"
    coupling_family: str = "naive"
    f_spread: float = 0.0
    damping_rate: float = 0.0
    n_max: int = 10
    output_path: str | None = None
    output_format: str = "csv"

    def validate(self) -> "SweepSpec":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if not self.families:
            raise ConfigError("families", "at least one family is required")
        allowed = cp.COUPLING_FAMILIES if self.experiment in ("coupling-multiplet", "simplify-demo") else FAMILIES
        for fam in self.families:
            if fam not in allowed:
                raise ConfigError("families", f"unknown family {fam!r} for {self.experiment}; expected one of {allowed}")
        if self.single_family not in FAMILIES:
            raise ConfigError("counting.single_family", f"unknown family {self.single_family!r}")
        if self.coupling_family not in cp.COUPLING_FAMILIES:
            raise ConfigError("counting.coupling_family", f"unknown family {self.coupling_family!r}")
        if not (isinstance(self.theta, (int, float)) and 0 < self.theta <= 2 * math.pi):
            raise ConfigError("theta", f"must lie in (0, 2pi], got {self.theta}")
        self._validate_grid()
        if not 0 <= self.k <= 2:
            raise ConfigError("counting.k", f"must lie in [0, 2] for a one-bit search space, got {self.k}")
        if self.r_max < 0:
            raise ConfigError("counting.r_max", "must be non-negative")
        if self.f_spread < 0:
            raise ConfigError("counting.f_spread", "must be non-negative")
        if self.damping_rate < 0:
            raise ConfigError("damping_rate", "must be non-negative")
        if self.n_max < 1:
            raise ConfigError("multiplet.n_max", "must be at least 1")
        if self.output_format not in ("csv", "json"):
            raise ConfigError("output.format", f"must be csv or json, got {self.output_format!r}")
        return self

    def _validate_grid(self):
        g = self.grid
        for name in ("f_min", "f_max", "f_step", "g", "epsilon"):
            v = getattr(g, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"error.{name}", f"must be a finite number, got {v!r}")
        if g.f_step <= 0:
            raise ConfigError("error.f_step", f"must be positive, got {g.f_step}")
        if g.f_max < g.f_min:
            raise ConfigError("error.f_max", f"must not be below f_min ({g.f_max} < {g.f_min})")
        if g.f_min < F_RANGE[0] or g.f_max > F_RANGE[1]:
            raise ConfigError("error.f_min", f"pulse-length errors must stay within {F_RANGE}")
        if (g.f_max - g.f_min) / g.f_step + 1 > MAX_GRID_POINTS:
            raise ConfigError("error.f_step", "grid has too many points")

    def resolved_output(self, override: str | None = None) -> Path:
        """Output path, relative paths resolved against $ROBUSTGATES_OUTPUT_DIR if set."""
        raw = override or self.output_path
        if raw is None:
            raise ConfigError("output.path", "no output path given")
        path = Path(raw)
        base = os.environ.get(OUTPUT_DIR_ENV)
        if base and not path.is_absolute():
            path = Path(base) / path
        return path


DEFAULT_FAMILIES = {
    "excitation-profile": FAMILIES,
    "fidelity-sweep": FAMILIES,
    "counting": ("naive", "BB1"),
    "coupling-multiplet": cp.COUPLING_FAMILIES,
    "simplify-demo": ("BB1",),
}


def default_spec(experiment: str) -> SweepSpec:
    if experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"unknown experiment {experiment!r}; expected one of {EXPERIMENTS}")
    spec = SweepSpec(experiment, DEFAULT_FAMILIES[experiment])
    if experiment == "counting":
        spec = replace(spec, grid=ErrorGrid(0.1, 0.1, 0.01), f_spread=0.05)
    elif experiment in ("coupling-multiplet", "simplify-demo"):
        spec = replace(spec, grid=ErrorGrid(0.0, 0.0, 0.01), spin_system=cp.alanine())
    return spec


def _spin_system(value) -> cp.SpinSystem:
    if value == "formate":
        return cp.formate()
    if value == "alanine":
        return cp.alanine()
    if isinstance(value, dict):
        try:
            if "preset" in value:
                params = {k: v for k, v in value.items() if k != "preset"}
                return {"formate": cp.formate, "alanine": cp.alanine}[value["preset"]](**params)
            return cp.SpinSystem.from_dict(value)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError("spin_system", f"invalid spin system: {exc}") from None
    raise ConfigError("spin_system", f"expected 'formate', 'alanine' or an object, got {value!r}")


def spec_from_dict(data: dict) -> SweepSpec:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}")
    if "experiment" not in data:
        raise ConfigError("experiment", "missing")
    spec = default_spec(data["experiment"])
    changes: dict = {}
    if "families" in data:
        fams = data["families"]
        if isinstance(fams, str):
            fams = [fams]
        if not isinstance(fams, list):
            raise ConfigError("families", "must be a list of family names")
        changes["families"] = tuple(fams)
    for key in ("theta", "phi"):
        if key in data:
            changes[key] = data[key]
    if "error" in data:
        err = data["error"]
        if not isinstance(err, dict):
            raise ConfigError("error", "must be an object")
        unknown = set(err) - {"f_min", "f_max", "f_step", "g", "epsilon"}
        if unknown:
            raise ConfigError("error", f"unknown keys {sorted(unknown)}")
        changes["grid"] = replace(spec.grid, **err)
    if "spin_system" in data:
        changes["spin_system"] = _spin_system(data["spin_system"])
    block_keys = {
        "counting": ("k", "r_max", "single_family", "coupling_family", "f_spread", "damping_rate"),
        "multiplet": ("n_max", "damping_rate"),
    }
    for block, keys in block_keys.items():
        if block in data:
            sub = data[block]
            if not isinstance(sub, dict):
                raise ConfigError(block, "must be an object")
            unknown = set(sub) - set(keys)
            if unknown:
                raise ConfigError(block, f"unknown keys {sorted(unknown)}")
            changes.update(sub)
    if "output" in data:
        out = data["output"]
        if not isinstance(out, dict):
            raise ConfigError("output", "must be an object")
        if "path" in out:
            changes["output_path"] = out["path"]
        if "format" in out:
            changes["output_format"] = out["format"]
    try:
        spec = replace(spec, **changes)
    except (TypeError, ValueError) as exc:
        raise ConfigError("<root>", str(exc)) from None
    return spec.validate()


def load_config(path) -> SweepSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ConfigError("config", f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"{path} is not valid JSON: {exc}") from None
    return spec_from_dict(data)


def spec_to_dict(spec: SweepSpec) -> dict:
    """Inverse of :func:`spec_from_dict`, used for documentation and tests."""
    out = {
        "schema_version": SCHEMA_VERSION,
        "experiment": spec.experiment,
        "families": list(spec.families),
        "theta": spec.theta,
        "phi": spec.phi,
        "error": {"f_min": spec.grid.f_min, "f_max": spec.grid.f_max, "f_step": spec.grid.f_step,
                  "g": spec.grid.g, "epsilon": spec.grid.epsilon},
        "counting": {"k": spec.k, "r_max": spec.r_max, "single_family": spec.single_family,
                     "coupling_family": spec.coupling_family, "f_spread": spec.f_spread,
                     "damping_rate": spec.damping_rate},
        "multiplet": {"n_max": spec.n_max, "damping_rate": spec.damping_rate},
        "output": {"format": spec.output_format},
    }
    if spec.spin_system is not None:
        out["spin_system"] = spec.spin_system.to_dict()
    if spec.output_path is not None:
        out["output"]["path"] = spec.output_path
    return out
