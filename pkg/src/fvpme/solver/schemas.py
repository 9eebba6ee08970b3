"""
Pydantic schemas for solver configuration and run reports.
"""

from typing import List, Optional

from pydantic import Field, field_validator

from src.fvpme.config import settings
from src.fvpme.core.enums import LinearSolverKind, TimeRule
from src.fvpme.core.schemas import BaseSchema


class SolverConfig(BaseSchema):
    """Exponent, time rule and nonlinear-solver policy of a run."""

    q: float = Field(..., ge=1.0, description="Power-law exponent; 1 is the linear mode")
    time_rule: TimeRule = Field(default=TimeRule.BDF2, description="bdf2 (Euler bootstrap) or euler")
    newton_tol: float = Field(default_factory=lambda: settings.solver.newton_tol)
    newton_max_iter: int = Field(default_factory=lambda: settings.solver.newton_max_iter, ge=0)
    damping: bool = Field(default_factory=lambda: settings.solver.damping)
    linear_solver: LinearSolverKind = Field(default_factory=lambda: settings.solver.linear_solver)
    fallback: bool = Field(default_factory=lambda: settings.solver.fallback)
    monotone_max_sweeps: int = Field(default_factory=lambda: settings.solver.monotone_max_sweeps, ge=1)
    krylov_rtol: float = Field(default=1e-13, description="Relative tolerance of the Krylov path")

    @field_validator("newton_tol", "krylov_rtol")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        """Tolerances must be positive."""
        if v <= 0:
            raise ValueError("tolerances must be positive")
        return v

    @field_validator("time_rule")
    @classmethod
    def validate_rule(cls, v: TimeRule) -> TimeRule:
        """Runs use one of the two built rules."""
        if TimeRule(v) == TimeRule.CUSTOM:
            raise ValueError("runs support the euler and bdf2 rules only")
        return v

    @property
    def newton_enabled(self) -> bool:
        return self.newton_max_iter > 0


class SolveStats(BaseSchema):
    """Outcome of one nonlinear solve."""

    iterations: int = 0
    residual: float = 0.0
    fallback_used: bool = False
    sweeps: int = 0


class StepRecord(BaseSchema):
    """Monitors after step k."""

    step: int
    time: float
    mass: float
    mass_drift: float
    energy: float
    energy_bound: float
    flux_l1: float = Field(..., description="Accumulated sum dt sum m_KL |psi_K - psi_L| up to this step")
    newton_iterations: int = 0
    fallback_used: bool = False
    residual: float = 0.0


class EnergyRecord(BaseSchema):
    """
    Energy ledgers at step l.

    ``energy`` is 1/4 sum m (u^l)^2 plus the accumulated dissipation and
    ``bound`` is 2 ||u^0||^2. ``euler_lhs``/``euler_rhs`` hold both sides of
    the implicit-Euler inequality of the step ending at l;
    ``bdf2_lhs``/``bdf2_rhs`` the telescoped BDF2 inequality (l >= 2 only).
    """

    step: int
    energy: float
    bound: float
    euler_lhs: Optional[float] = None
    euler_rhs: Optional[float] = None
    bdf2_lhs: Optional[float] = None
    bdf2_rhs: Optional[float] = None

    @property
    def energy_slack(self) -> float:
        return self.bound - self.energy

    @property
    def ledger_slack(self) -> Optional[float]:
        if self.bdf2_lhs is not None and self.bdf2_rhs is not None:
            return self.bdf2_rhs - self.bdf2_lhs
        if self.euler_lhs is not None and self.euler_rhs is not None:
            return self.euler_rhs - self.euler_lhs
        return None


class WeakFormResidual(BaseSchema):
    """Terms of the discrete weak formulation for one test function."""

    A: float = Field(..., description="int int deltahat(u) pi phihat")
    B: float = Field(..., description="transmissibility term against P phi")
    C: float = Field(..., description="commutator term against phihat - P phi")
    total: float
    scale: float = Field(..., description="Sum of absolute contributions")
    test_vector_gradient: float = Field(..., description="sup norm of grad(phihat - P phi)")


class RunReport(BaseSchema):
    """Per-step monitors and global estimate quantities of one run."""

    run_id: str = ""
    q: float
    time_rule: TimeRule
    n_cells: int
    n_steps: int
    records: List[StepRecord] = Field(default_factory=list)
    wall_time: float = 0.0
    initial_l2_squared: float = 0.0
    psi_l1: float = Field(0.0, description="||pi psi(u)||_L1(Q_T)")
    flux_l1: float = Field(0.0, description="||grad psi(u)||_L1(Q_T)")
    phi_l2: float = Field(0.0, description="||pi phi(u)||_L2(Q_T)")
    grad_phi_l2: float = Field(0.0, description="||grad phi(u)||_L2(Q_T)")
    u_lq1: float = Field(0.0, description="||pi u||_L^(q+1)(Q_T)")
    max_mass_drift: float = 0.0
    failures: List[str] = Field(default_factory=list)
    violations: List[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and not self.violations
