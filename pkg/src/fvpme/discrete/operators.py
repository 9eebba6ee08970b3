"""
Reconstruction, gradient and projection operators with discrete norms.
"""

from typing import Callable, Optional, Sequence

import numpy as np

from src.fvpme.core.exceptions import OutOfDomainError, ValidationError
from src.fvpme.discrete.fields import CellVector, DiamondField, SpaceTimeField, WeightField
from src.fvpme.discrete.quadrature import SpaceFunction, cell_quadrature, integrate_cells
from src.fvpme.mesh.geometry import AdmissibleMesh, locate_points
from src.fvpme.time_algebra.grid import TimeGrid

SpaceTimeFunction = Callable[[np.ndarray, float], np.ndarray]


def _values(v) -> np.ndarray:
    return np.asarray(getattr(v, "values", v), dtype=float)


def reconstruct(cell_vector: CellVector, point: Sequence[float]) -> float:
    """
    Value of the piecewise-constant reconstruction at a point.

    Cartesian meshes use half-open cells along each axis (see locate_points).

    Raises:
        OutOfDomainError: point outside the mesh
    """
    return float(reconstruct_many(cell_vector, np.atleast_2d(point))[0])


def reconstruct_many(cell_vector: CellVector, points: np.ndarray) -> np.ndarray:
    """Vectorized reconstruct over points of shape (P, d)."""
    ids = locate_points(cell_vector.mesh, points)
    outside = np.nonzero(ids < 0)[0]
    if outside.size:
        raise OutOfDomainError(
            "point lies outside the domain",
            details={"point": np.atleast_2d(points)[outside[0]].tolist()}
        )
    return cell_vector.values[ids]


def interface_differences(mesh: AdmissibleMesh, values: np.ndarray) -> np.ndarray:
    """v_L - v_K on every interior interface; trailing axes are carried along."""
    return values[..., mesh.iface_cells[:, 1]] - values[..., mesh.iface_cells[:, 0]]


def discrete_gradient(cell_vector: CellVector) -> DiamondField:
    """
    Diamond gradient d (v_L - v_K) / |x_K - x_L| n_KL, with n_KL pointing from K to L.

    This is the same vector as d (v_K - v_L) (x_K - x_L) / |x_K - x_L|^2.
    """
    mesh = cell_vector.mesh
    slope = mesh.dim * interface_differences(mesh, cell_vector.values) / mesh.iface_distances
    return DiamondField(mesh, slope[:, None] * mesh.iface_normals)


def gradient_sup_norm(mesh: AdmissibleMesh, values: np.ndarray) -> float:
    """max_D |grad v| = max d |v_K - v_L| / |x_K - x_L|."""
    if mesh.n_interfaces == 0:
        return 0.0
    return float(np.abs(mesh.dim * interface_differences(mesh, _values(values))
                        / mesh.iface_distances).max())


def gradient_l2_squared(mesh: AdmissibleMesh, values: np.ndarray) -> float:
    """||grad v||^2_L2 = d sum tau_KL (v_K - v_L)^2."""
    diff = interface_differences(mesh, _values(values))
    return float(mesh.dim * (mesh.transmissibilities @ diff ** 2))


def project(mesh: AdmissibleMesh, function: SpaceFunction) -> CellVector:
    """Cell averages (1/m_K) int_K f by quadrature."""
    return CellVector(mesh, integrate_cells(mesh, function) / mesh.measures)


def project_test_function(
    mesh: AdmissibleMesh,
    grid: TimeGrid,
    function: SpaceTimeFunction
) -> np.ndarray:
    """
    Space-time projection of a test function, shape (n+1, N).

    Slot 0 holds the averages at t_0; slot k >= 1 holds the averages at
    t_(k-1), the left end of step k.
    """
    rule = cell_quadrature(mesh)
    slots = np.empty((grid.n + 1, mesh.n_cells))
    sample_times = np.concatenate([[grid.times[0]], grid.times[:-1]])
    for k, t in enumerate(sample_times):
        values = np.asarray(function(rule.points, float(t)), dtype=float).reshape(-1)
        slots[k] = rule.integrate_cells(values, mesh.n_cells) / mesh.measures
    return slots


def l2_norm(mesh: AdmissibleMesh, values, weights: Optional[WeightField] = None) -> float:
    """||pi v||_L2."""
    v = _values(values)
    m = mesh.measures if weights is None else mesh.measures * weights.values
    return float(np.sqrt(m @ v ** 2))


def lp_norm(mesh: AdmissibleMesh, values, p: float) -> float:
    """||pi v||_Lp."""
    v = _values(values)
    return float((mesh.measures @ np.abs(v) ** p) ** (1.0 / p))


def norm_2T(cell_vector: CellVector) -> float:
    """sqrt(||pi v||^2 + ||grad v||^2)."""
    mesh = cell_vector.mesh
    return float(np.sqrt(mesh.measures @ cell_vector.values ** 2
                         + gradient_l2_squared(mesh, cell_vector.values)))


def norm_pm(mesh: AdmissibleMesh, values, p: float) -> float:
    """(||pi v||_p^p + ||grad v||_p^p)^(1/p)."""
    if p < 1:
        raise ValidationError("p must be at least 1", details={"p": p})
    v = _values(values)
    cell_part = mesh.measures @ np.abs(v) ** p
    if mesh.n_interfaces:
        grad = mesh.dim * np.abs(interface_differences(mesh, v)) / mesh.iface_distances
        grad_part = mesh.diamond_measures @ grad ** p
    else:
        grad_part = 0.0
    return float((cell_part + grad_part) ** (1.0 / p))


def seminorm_pmqn(field: SpaceTimeField, p: float, q: float) -> float:
    """(sum_k dt_k ||u^k||_{p,m}^q)^(1/q) over the steps k = 1..n."""
    if p < 1 or q < 1:
        raise ValidationError("p and q must be at least 1", details={"p": p, "q": q})
    norms = np.array([norm_pm(field.mesh, field.values[k], p) for k in range(1, field.n + 1)])
    return float((field.grid.steps @ norms ** q) ** (1.0 / q))


def space_time_lp_norm(field: SpaceTimeField, p: float, slots: Optional[np.ndarray] = None) -> float:
    """||pi u||_{Lp(Q_T)} with u^k on step k."""
    values = field.values[1:] if slots is None else slots
    per_step = np.abs(values) ** p @ field.mesh.measures
    return float((field.grid.steps @ per_step) ** (1.0 / p))
