"""
Residual and Jacobian of one implicit step.

Every step of the scheme has the form

    F_K(u) = (c u_K - h_K) m_K / dt + sum_L tau_KL (psi(u_K) - psi(u_L)) = 0

with c = 1, h = u^(k-1) for an implicit Euler step and c = 3/2,
h = 2 u^(k-1) - u^(k-2) / 2 for a BDF2 step.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from src.fvpme.core.enums import TimeRule
from src.fvpme.core.exceptions import ValidationError
from src.fvpme.graphs.power_law import PowerLaw
from src.fvpme.mesh.geometry import AdmissibleMesh

EULER_COEFFICIENT = 1.0
BDF2_COEFFICIENT = 1.5


def history_term(
    rule: TimeRule,
    u_km1: np.ndarray,
    u_km2: Optional[np.ndarray] = None
) -> np.ndarray:
    """h of the step; BDF2 needs the two previous states."""
    if TimeRule(rule) == TimeRule.EULER:
        return np.asarray(u_km1, dtype=float)
    if u_km2 is None:
        raise ValidationError("a BDF2 step needs two previous states")
    return 2.0 * np.asarray(u_km1, dtype=float) - 0.5 * np.asarray(u_km2, dtype=float)


def step_coefficient(rule: TimeRule) -> float:
    return EULER_COEFFICIENT if TimeRule(rule) == TimeRule.EULER else BDF2_COEFFICIENT


@dataclass(frozen=True, eq=False)
class StepSystem:
    """Nonlinear system of one step; ``graph`` supplies psi and psi'."""

    mesh: AdmissibleMesh
    graph: PowerLaw
    dt: float
    coefficient: float
    history: np.ndarray

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValidationError("time step must be positive", details={"dt": self.dt})
        history = np.asarray(self.history, dtype=float)
        if history.shape != (self.mesh.n_cells,):
            raise ValidationError("history term has the wrong length")
        object.__setattr__(self, "history", history)

    @property
    def mass_over_dt(self) -> np.ndarray:
        return self.mesh.measures / self.dt

    @property
    def scale(self) -> float:
        """max_K c m_K / dt, the residual normalization."""
        return float(self.coefficient * self.mass_over_dt.max())

    def flux_divergence(self, u: np.ndarray) -> np.ndarray:
        """sum_L tau_KL (psi(u_K) - psi(u_L))."""
        return self.mesh.graph_laplacian() @ self.graph.psi(u)

    def residual(self, u: np.ndarray) -> np.ndarray:
        return self.mass_over_dt * (self.coefficient * u - self.history) + self.flux_divergence(u)

    def residual_norm(self, u: np.ndarray) -> float:
        """||F(u)||_inf / max(c m / dt)."""
        return float(np.abs(self.residual(u)).max() / self.scale)

    def jacobian(self, u: np.ndarray) -> sp.csr_matrix:
        """diag(c m / dt) + L diag(psi'(u))."""
        diag = sp.diags(self.coefficient * self.mass_over_dt)
        return (diag + self.mesh.graph_laplacian() @ sp.diags(self.graph.dpsi(u))).tocsr()

    def row_conductance(self) -> np.ndarray:
        """sum_L tau_KL per cell."""
        return np.asarray(self.mesh.graph_laplacian().diagonal(), dtype=float)
