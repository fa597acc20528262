"""Composite pulse families and systematic error models.

A composite pulse replaces a single ``theta_phi`` rotation with a short
fixed sequence of rotations whose errors cancel. Five families are built
here (BB1, NB1, PB1, B4, P4) alongside the plain single pulse ("naive").
Sequences are stored as ordered :class:`PulseElement` tuples, first element
applied first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .qcore import rotation_unitary, su2_rotation

TWO_PI = 2 * math.pi
MAX_ELEMENT_ANGLE = 8 * math.pi

FAMILIES = ("naive", "BB1", "NB1", "PB1", "B4", "P4")


def normalize_phase(phase: float) -> float:
    """Map a phase to [0, 2pi)."""
    p = math.fmod(phase, TWO_PI)
    if p < 0:
        p += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2pi
    return 0.0 if p >= TWO_PI else p


@dataclass(frozen=True)
class PulseElement:
    """One rotation ``theta`` about the transverse axis at ``phase``."""

    theta: float
    phase: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.theta) or abs(self.theta) > MAX_ELEMENT_ANGLE + 1e-9:
            raise ValueError(f"pulse angle {self.theta} outside [-8pi, 8pi]")
        object.__setattr__(self, "phase", normalize_phase(self.phase))

    def canonical(self) -> "PulseElement":
        """Rewrite a negative rotation as a positive one about ``phase + pi``."""
        if self.theta < 0:
            return PulseElement(-self.theta, self.phase + math.pi)
        return self


@dataclass(frozen=True)
class ErrorModel:
    """Systematic control errors shared by every element of a sequence.

    f: fractional pulse-length (field strength) error.
    g: off-resonance offset as a fraction of the nominal field strength.
    epsilon: constant phase offset in radians.
    """

    f: float = 0.0
    g: float = 0.0
    epsilon: float = 0.0

    @property
    def is_ideal(self) -> bool:
        return self.f == 0 and self.g == 0 and self.epsilon == 0


NO_ERROR = ErrorModel()


@dataclass(frozen=True)
class CompositeSequence:
    elements: tuple[PulseElement, ...]
    family: str
    target_theta: float
    target_phi: float = 0.0
    correction_phase: float | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown pulse family {self.family!r}")
        object.__setattr__(self, "elements", tuple(self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def canonical(self) -> "CompositeSequence":
        """Same sequence with every negative rotation made positive."""
        return replace(self, elements=tuple(e.canonical() for e in self.elements))

    def target(self) -> np.ndarray:
        return rotation_unitary(self.target_theta, self.target_phi)


def _check_theta(theta: float, family: str) -> None:
    if not (0 < theta <= TWO_PI):
        raise ValueError(f"{family} needs 0 < theta <= 2pi, got {theta}")


def bb1_angle(theta: float, denominator: float = 4 * math.pi) -> float:
    """``arccos(-theta / denominator)``, the correction phase of the B/P families."""
    return math.acos(-theta / denominator)


def naive(theta: float, phi: float = 0.0) -> CompositeSequence:
    return CompositeSequence((PulseElement(theta, phi),), "naive", theta, phi)


def _five_element(family, theta, phi, psi, angles, phases) -> CompositeSequence:
    half = PulseElement(theta / 2, phi)
    middle = tuple(PulseElement(a, phi + p) for a, p in zip(angles, phases))
    return CompositeSequence((half, *middle, half), family, theta, phi, psi)


def bb1(theta: float, phi: float = 0.0) -> CompositeSequence:
    """Broadband BB1: robust to pulse-length errors.

    ``(theta/2)_phi pi_(phi+psi) 2pi_(phi+3psi) pi_(phi+psi) (theta/2)_phi``
    with ``psi = arccos(-theta / 4pi)``.
    """
    _check_theta(theta, "BB1")
    psi = bb1_angle(theta)
    return _five_element("BB1", theta, phi, psi,
                         (math.pi, TWO_PI, math.pi), (psi, 3 * psi, psi))


def nb1(theta: float, phi: float = 0.0) -> CompositeSequence:
    """Narrowband NB1: BB1 with the central phase changed to ``phi - psi``."""
    _check_theta(theta, "NB1")
    psi = bb1_angle(theta)
    return _five_element("NB1", theta, phi, psi,
                         (math.pi, TWO_PI, math.pi), (psi, -psi, psi))


def pb1(theta: float, phi: float = 0.0) -> CompositeSequence:
    """Passband PB1, with ``psi' = arccos(-theta / 8pi)``."""
    _check_theta(theta, "PB1")
    psi = bb1_angle(theta, 8 * math.pi)
    return _five_element("PB1", theta, phi, psi,
                         (TWO_PI, 2 * TWO_PI, TWO_PI), (psi, -psi, psi))


def _four_fold(family, theta, phi, psi, block, centre) -> CompositeSequence:
    half = PulseElement(theta / 2, phi)
    bracket = tuple(PulseElement(a, phi + p) for a, p in block) * 4
    middle = tuple(PulseElement(a, phi + p) for a, p in centre)
    return CompositeSequence((half, *bracket, *middle, *bracket, half),
                             family, theta, phi, psi)


def b4(theta: float, phi: float = 0.0) -> CompositeSequence:
    """B4: four BB1-style correction blocks either side of a negative core.

    The three core rotations (-2pi, -4pi, -2pi) are kept with signed angles;
    :meth:`CompositeSequence.canonical` turns them into positive rotations
    about axes shifted by pi.
    """
    _check_theta(theta, "B4")
    psi = bb1_angle(theta, 24 * math.pi)
    block = ((math.pi, psi), (TWO_PI, 3 * psi), (math.pi, psi))
    centre = ((-TWO_PI, psi), (-2 * TWO_PI, -psi), (-TWO_PI, psi))
    return _four_fold("B4", theta, phi, psi, block, centre)


def p4(theta: float, phi: float = 0.0) -> CompositeSequence:
    """P4, the PB1 analogue of B4, with ``psi' = arccos(-theta / 48pi)``."""
    _check_theta(theta, "P4")
    psi = bb1_angle(theta, 48 * math.pi)
    block = ((TWO_PI, psi), (2 * TWO_PI, -psi), (TWO_PI, psi))
    centre = ((-2 * TWO_PI, psi), (-4 * TWO_PI, -psi), (-2 * TWO_PI, psi))
    return _four_fold("P4", theta, phi, psi, block, centre)


BUILDERS = {"naive": naive, "BB1": bb1, "NB1": nb1, "PB1": pb1, "B4": b4, "P4": p4}


def composite(family: str, theta: float, phi: float = 0.0) -> CompositeSequence:
    try:
        builder = BUILDERS[family]
    except KeyError:
        raise ValueError(f"unknown pulse family {family!r}; expected one of {FAMILIES}") from None
    return builder(theta, phi)


def element_propagator(e: PulseElement, err: ErrorModel = NO_ERROR) -> np.ndarray:
    """Actual 2x2 propagator of one element under ``err``.

    ``exp(-i |theta| ((1+f)(Ix cos p + Iy sin p) + g Iz))`` where ``p`` is the
    element phase plus ``epsilon``, plus pi for negative rotations. The
    off-resonance term lasts as long as the pulse, hence the ``|theta|``.
    """
    p = e.phase + err.epsilon + (math.pi if e.theta < 0 else 0.0)
    ax = (1 + err.f) * math.cos(p)
    ay = (1 + err.f) * math.sin(p)
    az = err.g
    norm = math.sqrt(ax * ax + ay * ay + az * az)
    if norm == 0:
        return np.eye(2, dtype=complex)
    return su2_rotation(abs(e.theta) * norm, (ax / norm, ay / norm, az / norm))


def sequence_propagator(seq, err: ErrorModel = NO_ERROR) -> np.ndarray:
    """Net propagator; the first element acts first (rightmost factor)."""
    u = np.eye(2, dtype=complex)
    for e in seq:
        u = element_propagator(e, err) @ u
    return u


def analytic_fidelity(family: str, theta: float, f: float) -> float | None:
    """Closed-form fidelity where one is known, else ``None``.

    naive: ``|cos(f theta / 2)|`` (exact).
    BB1: sixth-order expansion
    ``1 - f^6 (32 pi^4 theta^2 + 14 pi^2 theta^4 - theta^6) / 9216``.
    """
    if family == "naive":
        return abs(math.cos(f * theta / 2))
    if family == "BB1":
        return 1 - f**6 * bb1_sixth_order_coefficient(theta)
    return None


def bb1_sixth_order_coefficient(theta: float) -> float:
    pi = math.pi
    return (32 * pi**4 * theta**2 + 14 * pi**2 * theta**4 - theta**6) / 9216


def nominal_duration(seq) -> float:
    """Total rotation angle, i.e. time in units of the inverse field strength."""
    return float(sum(abs(e.theta) for e in seq))
