"""Simulated versions of the excitation, counting and multiplet experiments.

Each function returns plain row dicts with a fixed column order, ready for
:func:`robustgates.harness.io.write_records`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import coupling as cp
from .. import pulses
from ..counting import CountingProblem, GateBackend, reference_signal, run_counting
from ..pulses import NO_ERROR, ErrorModel
from ..qcore import infidelity, rotation_unitary, tensor

PSEUDO_HADAMARD_PHASE = math.pi / 2

# Largest deviation from the isolated two-spin counting signal that still
# counts as a working spin-system simplification. Oracle values at the
# default alanine couplings: 1.3e-4 with H-methyl couplings removed, 1.94
# with them present.
SIMPLIFY_THRESHOLD = 0.05


def excitation_signal(family: str, theta: float, err: ErrorModel) -> complex:
    """Transverse signal ``2<I+>`` after a composite ``theta_y`` pulse on ``|0>``."""
    u = pulses.sequence_propagator(pulses.composite(family, theta, PSEUDO_HADAMARD_PHASE), err)
    # column 0 of U is the final state; <I+> = rho[1, 0] = psi_1 conj(psi_0)
    psi = u[:, 0]
    return complex(2 * psi[1] * np.conj(psi[0]))


def excitation_profile(family: str, f_grid, theta: float = math.pi / 2,
                       g: float = 0.0, epsilon: float = 0.0) -> list[dict]:
    rows = []
    for f in f_grid:
        s = excitation_signal(family, theta, ErrorModel(f, g, epsilon))
        rows.append({"family": family, "theta": theta, "f": f, "g": g, "epsilon": epsilon,
                     "signal_re": s.real, "signal_im": s.imag, "amplitude": abs(s)})
    return rows


def fidelity_sweep(family: str, f_grid, theta: float, phi: float = 0.0,
                   g: float = 0.0, epsilon: float = 0.0) -> list[dict]:
    seq = pulses.composite(family, theta, phi)
    target = rotation_unitary(theta, phi)
    rows = []
    for f in f_grid:
        v = pulses.sequence_propagator(seq, ErrorModel(f, g, epsilon))
        inf = infidelity(v, target)
        analytic = pulses.analytic_fidelity(family, theta, f) if g == 0 and epsilon == 0 else None
        rows.append({"family": family, "theta": theta, "phi": phi, "f": f, "g": g,
                     "epsilon": epsilon, "fidelity": 1 - inf, "infidelity": inf,
                     "analytic_fidelity": analytic})
    return rows


def counting_rows(problem: CountingProblem, backend: GateBackend,
                  sys: cp.SpinSystem | None = None) -> list[dict]:
    records = run_counting(problem, backend, sys)
    rows = []
    for rec in records:
        ref = reference_signal(problem, rec.r)
        rows.append({"single_family": backend.single_family, "coupling_family": backend.coupling_family,
                     "k": problem.k, "f": backend.error.f, "f_spread": backend.f_spread, "r": rec.r,
                     "duration": rec.duration, "signal_re": rec.signal.real, "signal_im": rec.signal.imag,
                     "reference_re": ref.real, "reference_im": ref.imag})
    return rows


# ---------------------------------------------------------------- multiplets

@dataclass(frozen=True)
class MultipletPoint:
    n: int
    duration: float
    components: tuple[cp.MultipletComponent, ...]
    relative_phases: tuple[float, ...]


def isolated_pair(sys: cp.SpinSystem, a: int = 0, b: int = 1) -> cp.SpinSystem:
    """Same spins with every coupling except ``a``-``b`` removed."""
    j = np.zeros((sys.n_spins, sys.n_spins))
    j[a, b] = j[b, a] = sys.j(a, b)
    return cp.SpinSystem(sys.nuclei, tuple(map(tuple, j)), sys.labels)


def _pseudo_pure_on(sys: cp.SpinSystem, spin: int) -> np.ndarray:
    factors = [np.eye(2) / 2] * sys.n_spins
    factors[spin] = np.diag([1.0, 0.0])
    return tensor(*factors).astype(complex)


def _coupling_gate_series(sys, family, n_max, observed, pulse_error):
    j_ref = sys.j(0, 1)
    gate = cp.compile_coupling(cp.composite_coupling(family, math.pi / 2), j_ref, observed)
    how = cp.Execution(pulse_error=pulse_error)
    u_gate = cp.program_propagator(gate, sys, j_ref, how)
    u = cp.program_propagator([cp.Pulse(observed, math.pi / 2, PSEUDO_HADAMARD_PHASE)], sys, j_ref, how)
    rho0 = _pseudo_pure_on(sys, observed)
    for n in range(n_max + 1):
        yield n, u @ rho0 @ u.conj().T, n * cp.program_duration(gate)
        u = u_gate @ u


def multiplet_series(sys: cp.SpinSystem, family: str, n_max: int = 10, observed: int = 1,
                     pulse_error: ErrorModel = NO_ERROR, damping_rate: float = 0.0) -> list[MultipletPoint]:
    """Observed-spin multiplet after ``n = 0..n_max`` pi/2 coupling gates.

    The observed spin gets a pseudo-Hadamard and then ``n`` coupling gates
    (total evolution ``n/2J``) of the chosen family, with its tilt pulses on
    the observed spin. Phases are measured against the same experiment on
    the isolated pair and tracked continuously along ``n``.
    """
    ref_sys = isolated_pair(sys)
    reference = [cp.multiplet_phases(rho, ref_sys, observed)
                 for _, rho, _ in _coupling_gate_series(ref_sys, "naive", n_max, observed, NO_ERROR)]
    points = []
    previous = None
    for (n, rho, duration), ref in zip(_coupling_gate_series(sys, family, n_max, observed, pulse_error),
                                       reference):
        decay = math.exp(-damping_rate * duration)
        comps = tuple(
            cp.MultipletComponent(c.groups, c.projections, c.weight, c.amplitude * decay)
            for c in cp.multiplet_phases(rho, sys, observed)
        )
        ref_amp = {c.projections[0]: c.amplitude for c in ref}
        raw = np.array([np.angle(c.amplitude / ref_amp[c.projections[0]]) for c in comps])
        if previous is not None:
            # continue each line's phase from the previous n
            raw = previous + np.angle(np.exp(1j * (raw - previous)))
        previous = raw
        points.append(MultipletPoint(n, duration, comps, tuple(float(p) for p in raw)))
    return points


def multiplet_spread(point: MultipletPoint) -> float:
    """Largest phase difference between lines of the same partner-spin doublet half."""
    by_half: dict = {}
    for c, p in zip(point.components, point.relative_phases):
        by_half.setdefault(c.projections[0], []).append(p)
    return max(max(v) - min(v) for v in by_half.values())


def multiplet_reference(sys: cp.SpinSystem, n: int, observed: int = 1) -> list[cp.MultipletComponent]:
    """Lines expected from the isolated pair, mapped onto ``sys``'s components."""
    ref_sys = isolated_pair(sys)
    *_, (_, rho, _) = _coupling_gate_series(ref_sys, "naive", n, observed, NO_ERROR)
    half = {c.projections[0]: c.amplitude for c in cp.multiplet_phases(rho, ref_sys, observed)}
    return [cp.MultipletComponent(c.groups, c.projections, c.weight, half[c.projections[0]])
            for c in cp.multiplet_phases(_pseudo_pure_on(sys, observed), sys, observed)]


def multiplet_error(point: MultipletPoint, sys: cp.SpinSystem, observed: int = 1) -> float:
    """Worst |a - a_ideal| over lines, sensitive to both phase and amplitude loss."""
    return cp.multiplet_deviation(point.components, multiplet_reference(sys, point.n, observed))


def multiplet_rows(sys: cp.SpinSystem, family: str, n_max: int = 10,
                   pulse_error: ErrorModel = NO_ERROR, damping_rate: float = 0.0) -> list[dict]:
    rows = []
    for point in multiplet_series(sys, family, n_max, pulse_error=pulse_error, damping_rate=damping_rate):
        if point.n == 0:
            continue
        for c, phase in zip(point.components, point.relative_phases):
            rows.append({"family": family, "f": pulse_error.f, "damping_rate": damping_rate, "n": point.n,
                         "duration": point.duration,
                         "projections": ";".join(f"{g}={m:+g}" for g, m in zip(c.groups, c.projections)),
                         "weight": c.weight, "amp_re": c.amplitude.real, "amp_im": c.amplitude.imag,
                         "relative_phase": phase})
    return rows


# ---------------------------------------------------------------- simplification demo

def simplify_scenarios(sys: cp.SpinSystem) -> dict[str, cp.SpinSystem]:
    """The system as given, and with control-spectator couplings removed.

    The control (spin 0) shares its nucleus with the spectators, so the
    couplings between them are homonuclear; removing them is what frequency
    selective pulses or decoupling would do.
    """
    control = sys.labels[0]
    spectators = {sys.labels[i] for i in range(2, sys.n_spins)}
    stripped = sys.with_couplings(**{f"{control}__{s}": 0.0 for s in spectators})
    return {"as-given": sys, "no-homonuclear": stripped}


def simplify_demo(sys: cp.SpinSystem, problem: CountingProblem, backend: GateBackend) -> list[dict]:
    """Counting on a system with spectators, compared to the isolated oracle."""
    rows = []
    reference = [reference_signal(problem, r) for r in range(problem.r_max + 1)]
    for name, scenario in simplify_scenarios(sys).items():
        for rec, ref in zip(run_counting(problem, backend, scenario), reference):
            rows.append({"scenario": name, "single_family": backend.single_family,
                         "coupling_family": backend.coupling_family, "f": backend.error.f, "r": rec.r,
                         "signal_re": rec.signal.real, "signal_im": rec.signal.imag,
                         "reference_re": ref.real, "reference_im": ref.imag,
                         "deviation": abs(rec.signal - ref)})
    return rows


def corruption(rows: list[dict], scenario: str) -> float:
    return max(r["deviation"] for r in rows if r["scenario"] == scenario)
