"""Robust two-qubit coupling gates and weakly coupled spin systems.

Evolution under ``pi J 2IzSz`` is a rotation about the ``2IzSz`` axis. Tilting
that axis toward ``2IzSx`` (by sandwiching free evolution between y pulses
on spin S) lets the composite pulse schedules of :mod:`robustgates.pulses`
protect the coupling angle, exactly as they protect a pulse angle.

Spin systems are treated in the doubly rotating frame with zero offsets, so
the Hamiltonian contains only ``zz`` couplings and is diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from . import pulses
from .pulses import NO_ERROR, ErrorModel, normalize_phase
from .qcore import (
    MAX_SPINS,
    hermitian_exponential,
    raising_operator,
    spin_operator,
    tensor,
    z_rotation,
)

COUPLING_FAMILIES = ("naive", "BB1", "NB1", "PB1")

PHASE_PLUS_Y = math.pi / 2
PHASE_MINUS_Y = 3 * math.pi / 2


# ---------------------------------------------------------------- two-spin algebra

def _two_spin_ops():
    izsz = 2 * spin_operator(2, 0, "z") @ spin_operator(2, 1, "z")
    izsx = 2 * spin_operator(2, 0, "z") @ spin_operator(2, 1, "x")
    return izsz, izsx


IZSZ, IZSX = _two_spin_ops()


def tilted_coupling_unitary(theta: float, phi: float) -> np.ndarray:
    """``exp(-i theta (2IzSz cos phi + 2IzSx sin phi))`` with I = spin 0, S = spin 1."""
    return hermitian_exponential(math.cos(phi) * IZSZ + math.sin(phi) * IZSX, theta)


@dataclass(frozen=True)
class CouplingElement:
    theta: float
    phase: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError("coupling angle must be finite")
        object.__setattr__(self, "phase", normalize_phase(self.phase))

    @property
    def signed_tilt(self) -> float:
        """Tilt angle in (-pi, pi]."""
        return self.phase - 2 * math.pi if self.phase > math.pi else self.phase


def composite_coupling(family: str, theta: float) -> tuple[CouplingElement, ...]:
    """Replace the plain coupling rotation ``theta_0`` with a composite one."""
    if family not in COUPLING_FAMILIES:
        raise ValueError(f"unsupported coupling family {family!r}; expected one of {COUPLING_FAMILIES}")
    seq = pulses.composite(family, theta, 0.0)
    return tuple(CouplingElement(e.theta, e.phase) for e in seq)


def coupling_error_propagator(elements: Sequence[CouplingElement], f: float = 0.0) -> np.ndarray:
    """Net 4x4 propagator with every coupling angle scaled by ``1 + f``."""
    u = np.eye(4, dtype=complex)
    for e in elements:
        u = tilted_coupling_unitary((1 + f) * e.theta, e.phase) @ u
    return u


def coupling_duration(elements: Sequence[CouplingElement]) -> float:
    """Total coupling angle; divide by ``pi J`` for seconds."""
    return float(sum(abs(e.theta) for e in elements))


# ---------------------------------------------------------------- event lists

@dataclass(frozen=True)
class Pulse:
    """Logical rotation on the qubit held by ``spin``.

    Executed as a hard pulse, so every spin of the same nucleus is rotated.
    ``tilt`` marks the axis-tilting pulses inside a compiled coupling gate;
    they are treated as instantaneous next to the delays.
    """

    spin: int
    theta: float
    phase: float = 0.0
    tilt: bool = False

    def __post_init__(self):
        pulses.PulseElement(self.theta, self.phase)  # validates the angle
        object.__setattr__(self, "phase", normalize_phase(self.phase))


@dataclass(frozen=True)
class Delay:
    """Free evolution, in units of ``t = 1/(4 J_ref)``."""

    duration: float

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"delay duration must be positive, got {self.duration}")

    def seconds(self, j_ref: float) -> float:
        return self.duration / (4 * j_ref)


@dataclass(frozen=True)
class FrameRotation:
    """Error-free, zero-duration ``exp(-i angle Iz)`` on a nucleus' frame."""

    spin: int
    angle: float


def delay_for_angle(theta: float) -> float:
    """Delay in units of t = 1/(4J) giving coupling angle ``theta`` (pi J tau = theta)."""
    return 4 * theta / math.pi


def compile_coupling_element(e: CouplingElement, j: float, spin_s: int = 1) -> list:
    """Pulse/delay events realising one tilted coupling rotation.

    The tilt toward ``2IzSx`` is ``Ry(phi) exp(-i theta 2IzSz) Ry(-phi)`` on
    spin S: a ``phi`` pulse about -y, the delay, then ``phi`` about +y (the
    directions swap for negative tilts).
    """
    if not j > 0:
        raise ValueError(f"coupling constant must be positive, got {j}")
    if e.theta <= 0:
        raise ValueError("compiled coupling elements need a positive angle")
    tilt = e.signed_tilt
    delay = Delay(delay_for_angle(e.theta))
    if tilt == 0:
        return [delay]
    first, last = (PHASE_MINUS_Y, PHASE_PLUS_Y) if tilt > 0 else (PHASE_PLUS_Y, PHASE_MINUS_Y)
    return [Pulse(spin_s, abs(tilt), first, tilt=True), delay, Pulse(spin_s, abs(tilt), last, tilt=True)]


def compile_coupling(elements: Sequence[CouplingElement], j: float, spin_s: int = 1) -> list:
    events = []
    for e in elements:
        events.extend(compile_coupling_element(e, j, spin_s))
    return events


def merge_pulses(events: Sequence) -> list:
    """Fuse adjacent +-y pulses on the same spin into one signed y rotation.

    Exact at zero pulse error, up to global phase; rotations are wrapped into
    (-pi, pi].
    """
    out: list = []
    for ev in events:
        prev = out[-1] if out else None
        if (isinstance(ev, Pulse) and isinstance(prev, Pulse) and prev.spin == ev.spin
                and _y_sign(ev) and _y_sign(prev)):
            total = _y_sign(prev) * prev.theta + _y_sign(ev) * ev.theta
            total = math.remainder(total, 2 * math.pi)
            out.pop()
            if abs(total) > 1e-12:
                out.append(Pulse(ev.spin, abs(total), PHASE_PLUS_Y if total > 0 else PHASE_MINUS_Y,
                                 tilt=prev.tilt and ev.tilt))
        else:
            out.append(ev)
    return out


def _y_sign(p: Pulse) -> int:
    if math.isclose(p.phase, PHASE_PLUS_Y, abs_tol=1e-12):
        return 1
    if math.isclose(p.phase, PHASE_MINUS_Y, abs_tol=1e-12):
        return -1
    return 0


# ---------------------------------------------------------------- spin systems

@dataclass(frozen=True)
class SpinSystem:
    """Weakly coupled spin-1/2 network.

    nuclei: isotope label per spin; hard pulses hit every spin of a nucleus.
    couplings: symmetric J table in Hz.
    labels: chemical-site label per spin; spins sharing a label are
        magnetically equivalent and are grouped in multiplet analysis.
    """

    nuclei: tuple[str, ...]
    couplings: tuple[tuple[float, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        n = len(self.nuclei)
        if not 1 <= n <= MAX_SPINS:
            raise ValueError(f"spin systems hold 1..{MAX_SPINS} spins, got {n}")
        j = np.asarray(self.couplings, dtype=float)
        if j.shape != (n, n):
            raise ValueError(f"coupling table must be {n}x{n}, got {j.shape}")
        if not np.allclose(j, j.T, rtol=0, atol=0):
            raise ValueError("coupling table must be symmetric")
        if np.any(np.diag(j) != 0):
            raise ValueError("coupling table must have a zero diagonal")
        object.__setattr__(self, "nuclei", tuple(self.nuclei))
        object.__setattr__(self, "couplings", tuple(tuple(float(x) for x in row) for row in j))
        labels = tuple(self.labels) if self.labels is not None else tuple(self.nuclei)
        if len(labels) != n:
            raise ValueError("one label per spin required")
        object.__setattr__(self, "labels", labels)

    @property
    def n_spins(self) -> int:
        return len(self.nuclei)

    @property
    def dim(self) -> int:
        return 2**self.n_spins

    def j(self, a: int, b: int) -> float:
        return self.couplings[a][b]

    def spins_of_nucleus(self, nucleus: str) -> list[int]:
        idx = [i for i, k in enumerate(self.nuclei) if k == nucleus]
        if not idx:
            raise ValueError(f"no spins of kind {nucleus!r} in system {self.nuclei}")
        return idx

    def with_couplings(self, **changes: float) -> "SpinSystem":
        """Copy with the coupling between two labels replaced, e.g. ``H__Me=0``."""
        j = [list(row) for row in self.couplings]
        for key, value in changes.items():
            a, b = key.split("__")
            for p in range(self.n_spins):
                for q in range(self.n_spins):
                    if {self.labels[p], self.labels[q]} == {a, b} and p != q:
                        j[p][q] = value
        return SpinSystem(self.nuclei, tuple(map(tuple, j)), self.labels)

    def to_dict(self) -> dict:
        return {"nuclei": list(self.nuclei), "labels": list(self.labels),
                "couplings": [list(row) for row in self.couplings]}

    @classmethod
    def from_dict(cls, data: dict) -> "SpinSystem":
        return cls(tuple(data["nuclei"]), tuple(tuple(r) for r in data["couplings"]),
                   tuple(data["labels"]) if data.get("labels") else None)


def formate(j_ch: float = 195.0) -> SpinSystem:
    """Isolated 1H-13C pair; spin 0 is 1H, spin 1 is 13C."""
    return SpinSystem(("1H", "13C"), ((0.0, j_ch), (j_ch, 0.0)), ("H", "C"))


def alanine(j_ch: float = 145.0, j_c_methyl: float = 4.5, j_h_methyl: float = 7.3) -> SpinSystem:
    """2-13C alanine CH pair plus three explicit methyl protons (5 spins)."""
    n = 5
    j = [[0.0] * n for _ in range(n)]

    def setj(a, b, v):
        j[a][b] = j[b][a] = v

    setj(0, 1, j_ch)
    for m in (2, 3, 4):
        setj(1, m, j_c_methyl)
        setj(0, m, j_h_methyl)
    return SpinSystem(("1H", "13C", "1H", "1H", "1H"), tuple(map(tuple, j)),
                      ("H", "C", "Me", "Me", "Me"))


def system_hamiltonian(sys: SpinSystem) -> np.ndarray:
    """``sum_{i<j} pi J_ij 2 Iz_i Iz_j`` in rad/s."""
    n = sys.n_spins
    diag = np.zeros(sys.dim)
    zs = [np.real(np.diag(spin_operator(n, i, "z"))) for i in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if sys.j(a, b):
                diag += math.pi * sys.j(a, b) * 2 * zs[a] * zs[b]
    return np.diag(diag).astype(complex)


def free_evolution(sys: SpinSystem, duration: float) -> np.ndarray:
    if duration < 0:
        raise ValueError(f"duration must be non-negative, got {duration}")
    # zz couplings only: the Hamiltonian is diagonal
    diag = np.real(np.diag(system_hamiltonian(sys)))
    return np.diag(np.exp(-1j * duration * diag))


def local_unitary(sys: SpinSystem, spins: Sequence[int], u2: np.ndarray) -> np.ndarray:
    """Apply the same 2x2 unitary to each listed spin."""
    chosen = set(spins)
    return tensor(*(u2 if i in chosen else np.eye(2) for i in range(sys.n_spins)))


def hard_pulse(sys: SpinSystem, nucleus: str, theta: float, phase: float,
               err: ErrorModel = NO_ERROR, family: str = "naive") -> np.ndarray:
    """Nonselective pulse on every spin of ``nucleus``, optionally composite."""
    spins = sys.spins_of_nucleus(nucleus)
    seq = pulses.composite(family, theta, phase)
    return local_unitary(sys, spins, pulses.sequence_propagator(seq, err))


# ---------------------------------------------------------------- execution

@dataclass(frozen=True)
class Execution:
    """How logical events turn into physics: pulse family and error settings."""

    pulse_family: str = "naive"
    pulse_error: ErrorModel = NO_ERROR
    coupling_error: float = 0.0


def event_propagator(ev, sys: SpinSystem, j_ref: float, how: Execution = Execution()) -> np.ndarray:
    if isinstance(ev, Delay):
        # delays are timed from the nominal J_ref; a J miscalibration of f
        # means the realised coupling angle is (1 + f) times the nominal one
        return free_evolution(sys, ev.seconds(j_ref) * (1 + how.coupling_error))
    nucleus = sys.nuclei[ev.spin]
    if isinstance(ev, Pulse):
        return hard_pulse(sys, nucleus, ev.theta, ev.phase, how.pulse_error, how.pulse_family)
    if isinstance(ev, FrameRotation):
        return local_unitary(sys, sys.spins_of_nucleus(nucleus), z_rotation(ev.angle))
    raise TypeError(f"unknown event {ev!r}")


def program_propagator(events: Sequence, sys: SpinSystem, j_ref: float | None = None,
                       how: Execution = Execution()) -> np.ndarray:
    """Net propagator of an event list, first event acting first."""
    if j_ref is None:
        j_ref = sys.j(0, 1)
    u = np.eye(sys.dim, dtype=complex)
    cache: dict = {}
    for ev in events:
        if ev not in cache:
            cache[ev] = event_propagator(ev, sys, j_ref, how)
        u = cache[ev] @ u
    return u


def program_duration(events: Sequence, pulse_family: str = "naive") -> float:
    """Nominal duration in rotation-angle units.

    Delays count their coupling angle (pi/4 per unit of t); logical pulses
    count the total angle of the pulse as realised in ``pulse_family``. Tilt
    pulses and frame rotations take no time.
    """
    total = 0.0
    for ev in events:
        if isinstance(ev, Delay):
            total += ev.duration * math.pi / 4
        elif isinstance(ev, Pulse) and not ev.tilt:
            total += pulses.nominal_duration(pulses.composite(pulse_family, ev.theta, ev.phase))
    return total


# ---------------------------------------------------------------- multiplets

@dataclass(frozen=True)
class MultipletComponent:
    """One line of the observed spin's multiplet.

    projections: total z projection of each coupled label group, in the
        order of ``groups``.
    weight: number of spin states contributing (1:3:3:1 for a methyl group).
    amplitude: complex line amplitude, 1 for a freshly excited spin.
    """

    groups: tuple[str, ...]
    projections: tuple[float, ...]
    weight: int
    amplitude: complex

    @property
    def phase(self) -> float:
        return float(np.angle(self.amplitude))


def multiplet_phases(rho: np.ndarray, sys: SpinSystem, observed: int) -> list[MultipletComponent]:
    """Split the observed spin's transverse signal by coupled-partner z states.

    The remaining spins are grouped by label; each group contributes its
    total z projection. A system without an equivalent-spin group simply
    yields the doublet (or plain line) amplitudes.
    """
    n = sys.n_spins
    if not 0 <= observed < n:
        raise IndexError(f"observed spin {observed} out of range")
    others = [i for i in range(n) if i != observed]
    groups: list[str] = []
    for i in others:
        if sys.labels[i] not in groups:
            groups.append(sys.labels[i])
    members = {g: [i for i in others if sys.labels[i] == g] for g in groups}

    # z projection of every basis state for every group
    bits = np.array(list(product((0, 1), repeat=n)))
    mz = 0.5 - bits  # +1/2 for |0>
    group_m = {g: mz[:, members[g]].sum(axis=1) for g in groups}

    signal_op = raising_operator(n, observed)
    # rho @ I+ diagonal picks out the coherence of each basis-state pair
    contrib = np.einsum("ij,ji->i", signal_op, rho)
    d_rest = 2 ** (n - 1)
    out = []
    values = [sorted(set(group_m[g]), reverse=True) for g in groups]
    for combo in product(*values):
        mask = np.ones(len(bits), dtype=bool)
        for g, m in zip(groups, combo):
            mask &= np.isclose(group_m[g], m)
        # only rows where the observed spin is |0> carry the I+ coherence
        mask &= bits[:, observed] == 0
        weight = int(mask.sum())
        amp = 2 * contrib[mask].sum() * d_rest / weight
        out.append(MultipletComponent(tuple(groups), tuple(float(m) for m in combo), weight, complex(amp)))
    return out


def phase_spread(components: Sequence[MultipletComponent], by: str | None = None) -> float:
    """Largest pairwise phase difference between lines of one sub-multiplet.

    With ``by`` set to a group label, lines are first split by that group's
    projection (e.g. the two halves of the CH doublet) and the worst spread
    across the splits is returned.
    """
    buckets: dict = {}
    for c in components:
        key = c.projections[c.groups.index(by)] if by is not None else None
        buckets.setdefault(key, []).append(c.amplitude)
    worst = 0.0
    for amps in buckets.values():
        for a in amps:
            for b in amps:
                worst = max(worst, abs(np.angle(a * np.conj(b))))
    return worst


def multiplet_deviation(components: Sequence[MultipletComponent],
                        reference: Sequence[MultipletComponent]) -> float:
    """Largest |a - a_ref| over matching lines."""
    ref = {c.projections: c.amplitude for c in reference}
    return max(abs(c.amplitude - ref[c.projections]) for c in components)
