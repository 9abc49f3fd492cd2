"""Hartmann ring-shaped potential with a minimal-length (GUP) correction.

Eigenstates, matrix elements checked against quadrature, recurrence tables
of averages, and first-order ``beta p^4 / mu`` level shifts.
"""

__version__ = "0.1.0"

from .gup_perturb import (
    DegenerateBlock,
    ValidityError,
    block_for_energy,
    diagonal_correction,
    p4_element,
    splitting_closed_form,
)
from .matel import Verdict, matrix_element, potential_elements
from .model import HartmannModel, QuantumState, derive_state, scan_states
from .quad_oracle import QuadratureSpec, integrate_angular, integrate_radial
from .recurrence import RecurrenceTable, build_table

__all__ = [
    "__version__",
    "HartmannModel",
    "QuantumState",
    "derive_state",
    "scan_states",
    "QuadratureSpec",
    "integrate_angular",
    "integrate_radial",
    "Verdict",
    "matrix_element",
    "potential_elements",
    "RecurrenceTable",
    "build_table",
    "DegenerateBlock",
    "ValidityError",
    "block_for_energy",
    "diagonal_correction",
    "p4_element",
    "splitting_closed_form",
]
