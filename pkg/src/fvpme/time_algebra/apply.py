"""
Application of multistep operators to space-time data.

Space-time values are arrays of shape (n+1, N): one row per time slot
t_0..t_n, one column per cell. Derivatives live on the steps 1..n and are
returned with shape (n, N).
"""

from typing import Optional

import numpy as np

from src.fvpme.core.exceptions import ValidationError
from src.fvpme.time_algebra.grid import TimeGrid
from src.fvpme.time_algebra.operator import MultistepOperator


def _values(field, n: int) -> np.ndarray:
    values = np.asarray(getattr(field, "values", field), dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] != n + 1:
        raise ValidationError(
            "space-time data must have one row per time slot",
            details={"rows": int(values.shape[0]), "expected": n + 1}
        )
    return values


def apply_delta(op: MultistepOperator, field) -> np.ndarray:
    """Discrete time derivative (Mhat u)_k for k = 1..n."""
    values = _values(field, op.n)
    return op.Mhat.matvec(values)[1:]


def apply_one_step(grid: TimeGrid, field) -> np.ndarray:
    """One-step differences (u^k - u^(k-1)) / dt_k."""
    values = _values(field, grid.n)
    return np.diff(values, axis=0) / grid.steps[:, None]


def transform_test_vector(op: MultistepOperator, phi) -> np.ndarray:
    """phihat = (Ahat^-1)^T phi, shape (n+1, N)."""
    values = _values(phi, op.n)
    return op.Ahat.solve_transposed(values)


def space_time_pairing(
    grid: TimeGrid,
    measures: np.ndarray,
    left: np.ndarray,
    right: np.ndarray,
    weights: Optional[np.ndarray] = None
) -> float:
    """
    Integral over Omega x (0, T) of two piecewise-constant fields on the steps.

    Args:
        grid: time grid
        measures: cell measures m_K
        left, right: arrays (n, N), value of step k on (t_(k-1), t_k]
        weights: optional cell weights omega_K
    """
    w = measures if weights is None else measures * weights
    return float(np.einsum("k,kc,kc,c->", grid.steps, left, right, w))


def duality_gap(
    op: MultistepOperator,
    measures: np.ndarray,
    u,
    phi
) -> float:
    """
    int int deltahat(u) phihat - int int delta(u) phi.

    Both step fields pair slot k of the test vector with step k.
    """
    u_vals = _values(u, op.n)
    phi_vals = _values(phi, op.n)
    phihat = transform_test_vector(op, phi_vals)
    lhs = space_time_pairing(op.grid, measures, apply_delta(op, u_vals), phihat[1:])
    rhs = space_time_pairing(op.grid, measures, apply_one_step(op.grid, u_vals), phi_vals[1:])
    return lhs - rhs
