"""
Error metrics of a trajectory against a reference.
"""

from typing import Callable, Tuple

import numpy as np

from src.fvpme.core.enums import ErrorSampling
from src.fvpme.core.exceptions import ValidationError
from src.fvpme.core.schemas import BaseSchema
from src.fvpme.discrete.fields import SpaceTimeField
from src.fvpme.discrete.quadrature import cell_quadrature

Reference = Callable[[np.ndarray, float], np.ndarray]


class ErrorMetrics(BaseSchema):
    """L2(Q_T), L1(Q_T) and L_inf(0,T;L2) errors."""

    l2_qt: float
    l1_qt: float
    linf_l2: float


def _sample_points(field: SpaceTimeField, sampling: ErrorSampling) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mesh = field.mesh
    if ErrorSampling(sampling) == ErrorSampling.GAUSS:
        rule = cell_quadrature(mesh)
        return rule.points, rule.weights, rule.cells
    return mesh.centers, mesh.measures, np.arange(mesh.n_cells)


def space_time_errors(
    field: SpaceTimeField,
    reference: Reference,
    sampling: ErrorSampling = ErrorSampling.GAUSS
) -> ErrorMetrics:
    """
    Errors of the piecewise-constant reconstruction against ``reference``.

    GAUSS samples the reference at the cell quadrature points and at the step
    midpoints for the Q_T norms; NODAL samples at cell centers and at the
    discrete times. Both use t_k for the L_inf(0,T;L2) error.
    """
    grid = field.grid
    points, weights, cells = _sample_points(field, sampling)
    gauss = ErrorSampling(sampling) == ErrorSampling.GAUSS
    q_times = grid.midpoints() if gauss else grid.times[1:]

    l2_steps = np.empty(grid.n)
    l1_steps = np.empty(grid.n)
    end_steps = np.empty(grid.n)
    for k in range(1, grid.n + 1):
        numerical = field.values[k][cells]
        diff = np.asarray(reference(points, float(q_times[k - 1])), dtype=float) - numerical
        l2_steps[k - 1] = weights @ diff ** 2
        l1_steps[k - 1] = weights @ np.abs(diff)
        if gauss:
            diff = np.asarray(reference(points, float(grid.times[k])), dtype=float) - numerical
        end_steps[k - 1] = weights @ diff ** 2

    return ErrorMetrics(
        l2_qt=float(np.sqrt(grid.steps @ l2_steps)),
        l1_qt=float(grid.steps @ l1_steps),
        linf_l2=float(np.sqrt(end_steps.max())) if grid.n else 0.0,
    )


def trajectory_error(field: SpaceTimeField, reference: SpaceTimeField) -> ErrorMetrics:
    """
    Errors against a finer-in-time trajectory on the same mesh.

    The reference grid must contain every time of ``field``; values are
    compared at the shared discrete times.

    Raises:
        ValidationError: different meshes or incompatible time grids
    """
    if field.mesh.n_cells != reference.mesh.n_cells:
        raise ValidationError("trajectories live on different meshes")
    if reference.n % field.n != 0:
        raise ValidationError(
            "reference step count must be a multiple of the field step count",
            details={"field_steps": field.n, "reference_steps": reference.n}
        )
    ratio = reference.n // field.n
    if not np.allclose(reference.grid.times[::ratio], field.grid.times, rtol=1e-12, atol=1e-14):
        raise ValidationError("reference grid does not refine the field grid")

    m = field.mesh.measures
    diff = field.values[1:] - reference.values[ratio::ratio]
    per_step_l2 = (diff ** 2) @ m
    return ErrorMetrics(
        l2_qt=float(np.sqrt(field.grid.steps @ per_step_l2)),
        l1_qt=float(field.grid.steps @ (np.abs(diff) @ m)),
        linf_l2=float(np.sqrt(per_step_l2.max())),
    )
