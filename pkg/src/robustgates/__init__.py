"""Composite-pulse robust quantum logic gates and their use in quantum counting."""

from .pulses import ErrorModel, analytic_fidelity, composite, sequence_propagator
from .qcore import propagator_fidelity, rotation_unitary

__version__ = "0.1.0"

__all__ = [
    "ErrorModel",
    "analytic_fidelity",
    "composite",
    "propagator_fidelity",
    "rotation_unitary",
    "sequence_propagator",
]
