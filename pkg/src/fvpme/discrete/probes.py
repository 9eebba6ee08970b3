"""
Executable checks of the discretization assumptions.

- space translates of reconstructions are small in the discrete norm
- cellwise pairs (u, v) are compatible with a monotone graph
- the one-step derivative satisfies summation by parts against test functions
- projections of smooth functions have controlled discrete gradients
"""

from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from src.fvpme.core.exceptions import UndefinedRatioError, ValidationError
from src.fvpme.core.logging import get_logger
from src.fvpme.discrete.fields import CellVector, SpaceTimeField, WeightField
from src.fvpme.discrete.operators import gradient_sup_norm, norm_2T, project
from src.fvpme.discrete.quadrature import SpaceFunction, cell_quadrature
from src.fvpme.graphs.base import MonotoneGraph
from src.fvpme.mesh.geometry import AdmissibleMesh, CartesianStructure, locate_points

logger = get_logger(__name__)


def _axis_overlap(edges: np.ndarray, shift: float) -> np.ndarray:
    """O[k, l] = |([a_k, b_k] - shift) intersected with [a_l, b_l]|."""
    a, b = edges[:-1], edges[1:]
    lo = np.maximum(a[:, None] - shift, a[None, :])
    hi = np.minimum(b[:, None] - shift, b[None, :])
    return np.clip(hi - lo, 0.0, None)


def _cartesian_cross(structure: CartesianStructure, grid_values: np.ndarray, shift: np.ndarray) -> float:
    """int f(x + shift) f(x) dx for a piecewise-constant f extended by zero."""
    overlaps = [_axis_overlap(structure.axis_edges(i), float(shift[i])) for i in range(len(structure.shape))]
    if len(overlaps) == 1:
        return float(grid_values @ (overlaps[0] @ grid_values))
    return float(np.sum(grid_values * (overlaps[0] @ grid_values @ overlaps[1].T)))


def translate_difference_l2(cell_vector: CellVector, shift: Sequence[float]) -> float:
    """||pi v(. + shift) - pi v||_{L2(R^d)} with extension by zero outside Omega."""
    mesh = cell_vector.mesh
    zeta = np.asarray(shift, dtype=float).reshape(mesh.dim)
    if not np.any(zeta):
        return 0.0

    if mesh.structure is not None:
        grid_values = mesh.structure.to_grid(cell_vector.values)
        self_term = _cartesian_cross(mesh.structure, grid_values, np.zeros(mesh.dim))
        cross = _cartesian_cross(mesh.structure, grid_values, zeta)
        return float(np.sqrt(max(0.0, 2.0 * (self_term - cross))))

    rule = cell_quadrature(mesh)
    own = cell_vector.values[rule.cells]
    shifted_ids = locate_points(mesh, rule.points + zeta)
    shifted = np.where(shifted_ids >= 0, cell_vector.values[np.maximum(shifted_ids, 0)], 0.0)
    inside_part = rule.weights @ (shifted - own) ** 2
    # Points x outside Omega with x + shift inside, written as y - shift for y in Omega
    back_ids = locate_points(mesh, rule.points - zeta)
    outside_part = rule.weights @ np.where(back_ids < 0, own ** 2, 0.0)
    return float(np.sqrt(inside_part + outside_part))


def translate_estimate_probe(cell_vector: CellVector, shift: Sequence[float]) -> float:
    """
    ||pi v(. + shift) - pi v||_{L2(R^d)} / ||v||_{2,T}.

    Raises:
        UndefinedRatioError: v is the zero vector
    """
    norm = norm_2T(cell_vector)
    if norm == 0.0:
        raise UndefinedRatioError("translate ratio is undefined for the zero vector")
    return translate_difference_l2(cell_vector, shift) / norm


def translate_sup(
    vectors: Sequence[CellVector],
    shifts: Sequence[Sequence[float]]
) -> float:
    """Sampled sup of the translate ratio over vectors and shifts."""
    worst = 0.0
    for v in vectors:
        for zeta in shifts:
            worst = max(worst, translate_estimate_probe(v, zeta))
    return worst


def graph_compatibility_check(
    u: CellVector,
    v: CellVector,
    graph: MonotoneGraph,
    tol: Optional[float] = None
) -> bool:
    """True iff v_K lies in beta(u_K) for every cell."""
    if u.mesh is not v.mesh and u.mesh.n_cells != v.mesh.n_cells:
        raise ValidationError("cell vectors live on different meshes")
    scalar_tol = graph.scalar_tol if tol is None else tol
    slack = scalar_tol * np.maximum(1.0, np.abs(v.values))
    return bool(np.all(graph.contains(u.values, v.values, slack)))


def summation_by_parts_residual(
    field: SpaceTimeField,
    space_factor: SpaceFunction,
    time_factor: Callable[[np.ndarray], np.ndarray],
    weights: Optional[WeightField] = None
) -> Tuple[float, float]:
    """
    int int omega delta(u) pi P phi + int int omega pi u d_t phi for phi = X(x) theta(t).

    The test function must vanish at t = 0 and t = T. P phi on step k is taken
    at t_(k-1); the time integral of d_t phi is theta(t_k) - theta(t_(k-1)).

    Returns:
        (residual, scale) where scale is the sum of the absolute terms
    """
    mesh = field.mesh
    m = mesh.measures if weights is None else mesh.measures * weights.values
    averages = project(mesh, space_factor).values
    theta = np.asarray(time_factor(field.grid.times), dtype=float)
    cell_integrals = m * averages

    jumps = np.diff(field.values, axis=0)
    derivative_term = (jumps * theta[:-1, None]) @ cell_integrals
    time_term = (field.values[1:] * np.diff(theta)[:, None]) @ cell_integrals
    residual = float(derivative_term.sum() + time_term.sum())
    scale = float(np.abs(derivative_term).sum() + np.abs(time_term).sum())
    return residual, scale


def gradient_projection_bound(
    mesh: AdmissibleMesh,
    function: SpaceFunction,
    gradient_sup: float
) -> Tuple[float, float]:
    """
    (||grad P phi||_inf, d (1 + 2 rho) ||grad phi||_inf).

    ``gradient_sup`` is the sup norm of the continuous gradient.
    """
    lhs = gradient_sup_norm(mesh, project(mesh, function).values)
    rhs = mesh.dim * (1.0 + 2.0 * mesh.rho) * gradient_sup
    if lhs > rhs:
        logger.warning("Projection gradient bound exceeded", extra={"lhs": lhs, "rhs": rhs})
    return lhs, rhs


def jensen_gap(mesh: AdmissibleMesh, function: SpaceFunction) -> float:
    """int f^2 - ||pi P f||^2 >= 0 under the same quadrature."""
    rule = cell_quadrature(mesh)
    values = np.asarray(function(rule.points), dtype=float).reshape(-1) * np.ones(rule.weights.size)
    continuous = float(rule.weights @ values ** 2)
    averages = rule.integrate_cells(values, mesh.n_cells) / mesh.measures
    return continuous - float(mesh.measures @ averages ** 2)
