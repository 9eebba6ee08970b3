"""
Monotone graphs package.
"""

from src.fvpme.graphs.base import FunctionGraph, InverseGraph, MonotoneGraph
from src.fvpme.graphs.power_law import PowerLaw, dpsi, phi, psi, psi_inverse
from src.fvpme.graphs.piecewise import PiecewiseGraph, identity_graph, stefan_graph
from src.fvpme.graphs.inequalities import bdf2_multiplier_gap, cs_gap, euler_multiplier_gap

__all__ = [
    "MonotoneGraph",
    "FunctionGraph",
    "InverseGraph",
    "PowerLaw",
    "psi",
    "dpsi",
    "phi",
    "psi_inverse",
    "PiecewiseGraph",
    "identity_graph",
    "stefan_graph",
    "cs_gap",
    "bdf2_multiplier_gap",
    "euler_multiplier_gap",
]
