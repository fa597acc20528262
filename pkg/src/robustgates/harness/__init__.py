"""Experiment driver: sweeps, configs and deterministic output files."""

from __future__ import annotations

from pathlib import Path

from .. import coupling as cp
from ..counting import CountingProblem, GateBackend
from ..pulses import ErrorModel
from . import experiments
from .config import ConfigError, SweepSpec, default_spec, load_config, spec_from_dict
from .experiments import excitation_profile, fidelity_sweep
from .io import read_records, write_records

__all__ = [
    "ConfigError",
    "SweepSpec",
    "default_spec",
    "excitation_profile",
    "fidelity_sweep",
    "load_config",
    "read_records",
    "run_sweep",
    "spec_from_dict",
    "sweep_records",
    "write_records",
]


def sweep_records(spec: SweepSpec) -> list[dict]:
    """Evaluate every grid point of ``spec`` in grid order."""
    spec.validate()
    g = spec.grid
    f_values = g.values()
    rows: list[dict] = []
    if spec.experiment == "excitation-profile":
        for fam in spec.families:
            rows += experiments.excitation_profile(fam, f_values, spec.theta, g.g, g.epsilon)
    elif spec.experiment == "fidelity-sweep":
        for fam in spec.families:
            rows += experiments.fidelity_sweep(fam, f_values, spec.theta, spec.phi, g.g, g.epsilon)
    elif spec.experiment == "counting":
        problem = CountingProblem(1, spec.k, spec.r_max)
        for fam in spec.families:
            for f in f_values:
                backend = GateBackend(fam, spec.coupling_family, ErrorModel(f, g.g, g.epsilon),
                                      damping_rate=spec.damping_rate, f_spread=spec.f_spread)
                rows += experiments.counting_rows(problem, backend, spec.spin_system)
    elif spec.experiment == "coupling-multiplet":
        sys = spec.spin_system or cp.alanine()
        for fam in spec.families:
            for f in f_values:
                rows += experiments.multiplet_rows(sys, fam, spec.n_max, ErrorModel(f, g.g, g.epsilon),
                                                   spec.damping_rate)
    elif spec.experiment == "simplify-demo":
        sys = spec.spin_system or cp.alanine()
        problem = CountingProblem(1, spec.k, spec.r_max)
        for fam in spec.families:
            for f in f_values:
                backend = GateBackend(spec.single_family, fam, ErrorModel(f, g.g, g.epsilon),
                                      damping_rate=spec.damping_rate, f_spread=spec.f_spread)
                rows += experiments.simplify_demo(sys, problem, backend)
    return rows


def run_sweep(spec: SweepSpec, out: str | Path | None = None) -> Path:
    """Run ``spec`` and write its records; returns the output path."""
    path = spec.resolved_output(str(out) if out is not None else None)
    return write_records(sweep_records(spec), path, spec.output_format if out is None else None)
