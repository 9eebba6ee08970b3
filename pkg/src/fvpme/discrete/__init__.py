"""
Discrete operators package.
"""

from src.fvpme.discrete.fields import CellVector, DiamondField, SpaceTimeField, WeightField
from src.fvpme.discrete.quadrature import QuadratureRule, cell_quadrature, integrate_cells, integrate_domain
from src.fvpme.discrete.operators import (
    discrete_gradient,
    gradient_l2_squared,
    gradient_sup_norm,
    interface_differences,
    l2_norm,
    lp_norm,
    norm_2T,
    norm_pm,
    project,
    project_test_function,
    reconstruct,
    reconstruct_many,
    seminorm_pmqn,
    space_time_lp_norm,
)
from src.fvpme.discrete.probes import (
    gradient_projection_bound,
    graph_compatibility_check,
    jensen_gap,
    summation_by_parts_residual,
    translate_difference_l2,
    translate_estimate_probe,
    translate_sup,
)
from src.fvpme.discrete.io import (
    read_cell_csv,
    read_space_time_csv,
    write_cell_csv,
    write_space_time_csv,
)

__all__ = [
    "CellVector",
    "DiamondField",
    "SpaceTimeField",
    "WeightField",
    "QuadratureRule",
    "cell_quadrature",
    "integrate_cells",
    "integrate_domain",
    "discrete_gradient",
    "gradient_l2_squared",
    "gradient_sup_norm",
    "interface_differences",
    "l2_norm",
    "lp_norm",
    "norm_2T",
    "norm_pm",
    "project",
    "project_test_function",
    "reconstruct",
    "reconstruct_many",
    "seminorm_pmqn",
    "space_time_lp_norm",
    "gradient_projection_bound",
    "graph_compatibility_check",
    "jensen_gap",
    "summation_by_parts_residual",
    "translate_difference_l2",
    "translate_estimate_probe",
    "translate_sup",
    "read_cell_csv",
    "read_space_time_csv",
    "write_cell_csv",
    "write_space_time_csv",
]
