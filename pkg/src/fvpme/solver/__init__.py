"""
Porous-medium solver package.
"""

from src.fvpme.solver.schemas import (
    EnergyRecord,
    RunReport,
    SolveStats,
    SolverConfig,
    StepRecord,
    WeakFormResidual,
)
from src.fvpme.solver.assembly import StepSystem, history_term, step_coefficient
from src.fvpme.solver.nonlinear import NonlinearSolver
from src.fvpme.solver.estimates import (
    energy_functionals,
    flux_l1_norm,
    mean_value_weights,
    mean_value_weights_ok,
    time_derivative_bound,
    weak_form_residual,
)
from src.fvpme.solver.scheme import build_report, discretize_initial, run, step_bdf2, step_euler

__all__ = [
    "EnergyRecord",
    "RunReport",
    "SolveStats",
    "SolverConfig",
    "StepRecord",
    "WeakFormResidual",
    "StepSystem",
    "history_term",
    "step_coefficient",
    "NonlinearSolver",
    "energy_functionals",
    "flux_l1_norm",
    "mean_value_weights",
    "mean_value_weights_ok",
    "time_derivative_bound",
    "weak_form_residual",
    "build_report",
    "discretize_initial",
    "run",
    "step_bdf2",
    "step_euler",
]
