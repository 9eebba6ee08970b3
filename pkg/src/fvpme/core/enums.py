"""
Core enums for the fvpme package.
"""

from enum import Enum


class TimeRule(str, Enum):
    """Discrete time-differentiation rules."""

    EULER = "euler"
    BDF2 = "bdf2"
    CUSTOM = "custom"


class LinearSolverKind(str, Enum):
    """Linear solvers available inside Newton iterations."""

    DIRECT = "direct"
    KRYLOV = "krylov"


class CouplingRule(str, Enum):
    """How the time step follows the mesh size in a refinement study."""

    H = "h"      # dt proportional to h
    H2 = "h2"    # dt proportional to h^2


class InitialPreset(str, Enum):
    """Named initial profiles."""

    BOX = "box"
    BARENBLATT = "barenblatt"
    CONSTANT = "constant"
    FILE = "file"
    HEAT_SINE = "heat_sine"


class ReferenceKind(str, Enum):
    """Exact reference solutions."""

    BARENBLATT = "barenblatt"
    HEAT_SINE = "heat_sine"


class GraphMode(str, Enum):
    """Evaluation mode of a monotone graph."""

    FUNCTION = "function"
    PIECEWISE = "piecewise"


class CheckStatus(str, Enum):
    """Outcome of a single validation or selftest check."""

    PASS = "pass"
    FAIL = "fail"
    SKIPPED = "skipped"


class ErrorSampling(str, Enum):
    """Where a reference solution is sampled when measuring errors."""

    GAUSS = "gauss"   # Gauss points per cell, midpoint per time step
    NODAL = "nodal"   # cell centers at the discrete times
