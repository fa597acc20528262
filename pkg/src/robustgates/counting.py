"""Approximate quantum counting on a two-qubit NMR register.

The search space is one bit (the target qubit). A control qubit is put in
superposition and the Grover iterate ``G = H U0 H^-1 U_fbar`` is applied to
the target conditionally on it, ``r`` times. The control's transverse signal
then reads ``<s| G^r |s>``, which oscillates at the Grover eigenphase
``2 arcsin(sqrt(k/N))`` and so reveals the number of solutions ``k``.

At pulse level every Hadamard pair becomes a pseudo-Hadamard (90_y) and its
inverse, controlled diagonal gates become one pi/2 coupling gate plus
error-free frame rotations, and every pulse and coupling gate can be swapped
for a composite version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import coupling as cp
from .pulses import FAMILIES, NO_ERROR, ErrorModel
from .qcore import evolve_state, raising_operator, rotation_unitary, tensor

CONTROL = 0
TARGET = 1

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class CountingProblem:
    n_bits: int = 1
    k: int = 1
    r_max: int = 20

    def __post_init__(self):
        if self.n_bits < 1:
            raise ValueError("n_bits must be positive")
        if not 0 <= self.k <= self.size:
            raise ValueError(f"k must lie in [0, {self.size}], got {self.k}")
        if self.r_max < 0:
            raise ValueError("r_max must be non-negative")

    @property
    def size(self) -> int:
        return 2**self.n_bits

    def default_assignment(self) -> tuple[int, ...]:
        """Mark the first ``k`` inputs as solutions."""
        return tuple(1 if x < self.k else 0 for x in range(self.size))

    @property
    def grover_angle(self) -> float:
        return 2 * math.asin(math.sqrt(self.k / self.size))


@dataclass(frozen=True)
class GateBackend:
    """Gate implementation used to run the counting circuit.

    ``f_spread`` is the standard deviation of the pulse-length error across
    the sample (RF inhomogeneity); signals are averaged over a Gaussian
    distribution of ``f`` centred on ``error.f`` by Gauss-Hermite quadrature.
    """

    single_family: str = "naive"
    coupling_family: str = "naive"
    error: ErrorModel = field(default_factory=ErrorModel)
    coupling_error: float = 0.0
    damping_rate: float = 0.0
    f_spread: float = 0.0
    quadrature_points: int = 15

    def __post_init__(self):
        if self.single_family not in FAMILIES:
            raise ValueError(f"unknown single-qubit family {self.single_family!r}")
        if self.coupling_family not in cp.COUPLING_FAMILIES:
            raise ValueError(f"unknown coupling family {self.coupling_family!r}")
        if self.damping_rate < 0:
            raise ValueError("damping rate must be non-negative")
        if self.f_spread < 0:
            raise ValueError("f_spread must be non-negative")
        if self.quadrature_points < 1:
            raise ValueError("quadrature_points must be positive")

    def ensemble(self) -> list[tuple[float, "GateBackend"]]:
        """(weight, backend with a definite f) pairs covering the f distribution."""
        if self.f_spread == 0:
            return [(1.0, self)]
        x, w = np.polynomial.hermite_e.hermegauss(self.quadrature_points)
        w = w / w.sum()
        return [(float(wi), replace(self, error=replace(self.error, f=self.error.f + self.f_spread * xi),
                                    f_spread=0.0))
                for xi, wi in zip(x, w)]

    @property
    def execution(self) -> cp.Execution:
        return cp.Execution(self.single_family, self.error, self.coupling_error)


@dataclass(frozen=True)
class SignalRecord:
    r: int
    signal: complex
    duration: float


# ---------------------------------------------------------------- matrix level

def _check_assignment(problem: CountingProblem, which_f) -> tuple[int, ...]:
    which_f = tuple(int(v) for v in which_f)
    if len(which_f) != problem.size or any(v not in (0, 1) for v in which_f):
        raise ValueError(f"assignment must be {problem.size} values of 0 or 1")
    if sum(which_f) != problem.k:
        raise ValueError(f"assignment marks {sum(which_f)} inputs but k = {problem.k}")
    return which_f


def oracle_unitary(problem: CountingProblem, which_f=None) -> np.ndarray:
    """``U_fbar``: ``|x> -> (-1)^(f(x)+1) |x>`` on the search register."""
    which_f = _check_assignment(problem, which_f if which_f is not None else problem.default_assignment())
    return np.diag([(-1.0) ** (v + 1) for v in which_f]).astype(complex)


def zero_reflection(n_bits: int) -> np.ndarray:
    """``U0``: flips the sign of ``|0...0>`` only."""
    d = np.ones(2**n_bits, dtype=complex)
    d[0] = -1
    return np.diag(d)


def hadamard(n_bits: int) -> np.ndarray:
    return tensor(*([HADAMARD] * n_bits))


def grover_iterate_matrix(problem: CountingProblem, which_f=None) -> np.ndarray:
    h = hadamard(problem.n_bits)
    return h @ zero_reflection(problem.n_bits) @ h.conj().T @ oracle_unitary(problem, which_f)


def controlled(u: np.ndarray) -> np.ndarray:
    """Control on the first (upper) qubit, |1> active."""
    d = u.shape[0]
    out = np.eye(2 * d, dtype=complex)
    out[d:, d:] = u
    return out


def reference_circuit(problem: CountingProblem, r: int, which_f=None) -> np.ndarray:
    """Ideal two-qubit propagator: pseudo-Hadamards on both qubits, then controlled-G^r."""
    if problem.n_bits != 1:
        raise ValueError("only the one-bit search space is built")
    prep = tensor(rotation_unitary(math.pi / 2, math.pi / 2), rotation_unitary(math.pi / 2, math.pi / 2))
    cg = controlled(grover_iterate_matrix(problem, which_f))
    return np.linalg.matrix_power(cg, r) @ prep


def reference_signal(problem: CountingProblem, r: int, which_f=None) -> complex:
    u = reference_circuit(problem, r, which_f)
    rho = evolve_state(_initial_state(2), u)
    return 2 * np.trace(rho @ raising_operator(2, CONTROL))


# ---------------------------------------------------------------- pulse level

def diagonal_gadget(diag, backend: GateBackend | None = None, j: float = 1.0) -> list:
    """Events for a two-qubit diagonal unitary, up to global phase.

    Any diagonal gate is ``exp(-i(a Iz + b Sz + c 2IzSz))``. Frame rotations
    supply ``a`` and ``b``; ``c`` must be a multiple of pi/2, since one pi/2
    coupling gate is available (multiples of pi are frame rotations too).
    """
    backend = backend or GateBackend()
    p = np.angle(np.asarray(diag, dtype=complex))
    p00, p01, p10, p11 = p
    a = -(p00 + p01 - p10 - p11) / 2
    b = -(p00 - p01 + p10 - p11) / 2
    c = -(p00 - p01 - p10 + p11) / 2
    c_red = c % math.pi
    if math.isclose(c_red, math.pi, abs_tol=1e-9):
        c_red = 0.0
    turns = round((c - c_red) / math.pi)
    a += turns * math.pi
    b += turns * math.pi
    events: list = []
    if math.isclose(c_red, math.pi / 2, abs_tol=1e-9):
        gate = cp.composite_coupling(backend.coupling_family, math.pi / 2)
        events.extend(cp.compile_coupling(gate, j, TARGET))
    elif abs(c_red) > 1e-9:
        raise ValueError("diagonal gate needs a coupling angle other than a multiple of pi/2")
    for spin, angle in ((CONTROL, a), (TARGET, b)):
        angle = math.remainder(angle, 4 * math.pi)
        if abs(angle) > 1e-12:
            events.append(cp.FrameRotation(spin, angle))
    return events


def preparation_events() -> list:
    """Pseudo-Hadamards on control and target."""
    return [cp.Pulse(CONTROL, math.pi / 2, math.pi / 2), cp.Pulse(TARGET, math.pi / 2, math.pi / 2)]


def iteration_events(problem: CountingProblem, backend: GateBackend, which_f=None, j: float = 1.0) -> list:
    """One controlled Grover iterate, first gate first: U_fbar, h^-1, U0, h."""
    if problem.n_bits != 1:
        raise ValueError("pulse programs are built for a one-bit search space only")
    uf = np.diag(controlled(oracle_unitary(problem, which_f)))
    u0 = np.diag(controlled(zero_reflection(1)))
    return [
        *diagonal_gadget(uf, backend, j),
        cp.Pulse(TARGET, math.pi / 2, 3 * math.pi / 2),
        *diagonal_gadget(u0, backend, j),
        cp.Pulse(TARGET, math.pi / 2, math.pi / 2),
    ]


def counting_pulse_program(problem: CountingProblem, backend: GateBackend, r: int,
                           which_f=None, j: float = 1.0) -> list:
    """Full event list: preparation then ``r`` controlled iterates."""
    return preparation_events() + iteration_events(problem, backend, which_f, j) * r


def _initial_state(n_spins: int) -> np.ndarray:
    """Pseudo-pure |00> on the qubits, spectators maximally mixed."""
    q = np.zeros((4, 4), dtype=complex)
    q[0, 0] = 1
    rest = n_spins - 2
    return tensor(q, np.eye(2**rest) / 2**rest) if rest else q


def run_counting(problem: CountingProblem, backend: GateBackend, sys: cp.SpinSystem | None = None,
                 which_f=None) -> list[SignalRecord]:
    """Control-spin signal for ``r = 0..r_max``.

    Spin 0 of ``sys`` is the control (observed) qubit and spin 1 the target;
    further spins are spectators. Damping multiplies the signal by
    ``exp(-rate * duration)``.
    """
    sys = sys or cp.formate()
    signals = np.zeros(problem.r_max + 1, dtype=complex)
    for weight, member in backend.ensemble():
        signals += weight * _coherent_signals(problem, member, sys, which_f)
    prep = preparation_events()
    step = iteration_events(problem, backend, which_f, sys.j(CONTROL, TARGET))
    d_prep = cp.program_duration(prep, backend.single_family)
    d_step = cp.program_duration(step, backend.single_family)
    out = []
    for r, signal in enumerate(signals):
        duration = d_prep + r * d_step
        out.append(SignalRecord(r, complex(signal * math.exp(-backend.damping_rate * duration)), duration))
    return out


def _coherent_signals(problem, backend, sys, which_f) -> np.ndarray:
    j_ref = sys.j(CONTROL, TARGET)
    how = backend.execution
    u_prep = cp.program_propagator(preparation_events(), sys, j_ref, how)
    u_step = cp.program_propagator(iteration_events(problem, backend, which_f, j_ref), sys, j_ref, how)
    observable = raising_operator(sys.n_spins, CONTROL)
    rho = evolve_state(_initial_state(sys.n_spins), u_prep)
    out = np.empty(problem.r_max + 1, dtype=complex)
    for r in range(problem.r_max + 1):
        out[r] = 2 * np.trace(rho @ observable)
        rho = evolve_state(rho, u_step)
    return out


# ---------------------------------------------------------------- analysis

def estimate_eigenphase(signal, oversample: int = 64) -> float:
    """Dominant angular frequency in [0, pi] of a real-valued signal series."""
    s = np.real(np.asarray(signal, dtype=complex))
    n = len(s) * oversample
    spectrum = np.abs(np.fft.rfft(s, n))
    freqs = 2 * math.pi * np.fft.rfftfreq(n)
    return float(freqs[int(np.argmax(spectrum))])


def envelope_decay_rate(signal, ideal, min_ideal: float = 0.5) -> float:
    """Exponential decay rate per iteration of ``|signal| / |ideal|``.

    Only points where the ideal signal has magnitude at least ``min_ideal``
    are used, so the zeros of the oscillation do not enter the fit.
    """
    signal = np.asarray(signal, dtype=complex)
    ideal = np.asarray(ideal, dtype=complex)
    r = np.arange(len(signal))
    keep = np.abs(ideal) >= min_ideal
    ratio = np.abs(signal[keep]) / np.abs(ideal[keep])
    slope, _ = np.polyfit(r[keep], np.log(np.maximum(ratio, 1e-300)), 1)
    return float(-slope)
