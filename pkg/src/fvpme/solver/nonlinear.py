"""
Nonlinear solvers for one implicit step.

Damped Newton is the primary path. When it stalls (or is disabled with
``newton_max_iter = 0``) a monotone nonlinear Jacobi iteration takes over:
each sweep solves, cell by cell,

    c m_K / dt u_K + (sum_L tau_KL) psi(u_K) = m_K / dt h_K + sum_L tau_KL psi(u_L^old)

through the resolvent of psi.
"""

from typing import Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres, spsolve

from src.fvpme.core.enums import LinearSolverKind
from src.fvpme.core.exceptions import NewtonDivergenceError
from src.fvpme.core.logging import get_logger
from src.fvpme.solver.assembly import StepSystem
from src.fvpme.solver.schemas import SolveStats, SolverConfig

logger = get_logger(__name__)

MIN_DAMPING = 2.0 ** -10


class NonlinearSolver:
    """
    Solves F(u) = 0 for a StepSystem.

    Convergence requires ||F||_inf / max(c m / dt) <= newton_tol and, for
    Newton, a last update with sup norm <= sqrt(newton_tol).
    """

    def __init__(self, config: SolverConfig) -> None:
        """
        Initialize the solver.

        Args:
            config: tolerances, linear solver and fallback policy
        """
        self.config = config

    def solve(self, system: StepSystem, guess: np.ndarray) -> Tuple[np.ndarray, SolveStats]:
        """
        Solve one step starting from ``guess``.

        Raises:
            NewtonDivergenceError: Newton failed and the fallback is off or exhausted
        """
        u = np.asarray(guess, dtype=float).copy()
        stats = SolveStats()

        if self.config.newton_enabled:
            solved, u_newton, stats = self._newton(system, u)
            if solved:
                return u_newton, stats
            if not self.config.fallback:
                raise NewtonDivergenceError(
                    "Newton iteration did not converge",
                    details={"residual": stats.residual, "iterations": stats.iterations}
                )
            logger.warning(
                "Newton stalled, switching to monotone iteration",
                extra={"residual": stats.residual, "iterations": stats.iterations}
            )
            # Restart from the guess if Newton left the finite range
            if np.all(np.isfinite(u_newton)):
                u = u_newton

        u, sweeps, residual = self._monotone(system, u)
        stats = SolveStats(
            iterations=stats.iterations,
            residual=residual,
            fallback_used=self.config.newton_enabled,
            sweeps=sweeps,
        )
        return u, stats

    def _linear_solve(self, jacobian, rhs: np.ndarray) -> np.ndarray:
        if LinearSolverKind(self.config.linear_solver) == LinearSolverKind.KRYLOV:
            inv_diag = 1.0 / jacobian.diagonal()
            preconditioner = LinearOperator(jacobian.shape, matvec=lambda x: inv_diag * x)
            x, info = gmres(
                jacobian, rhs,
                rtol=self.config.krylov_rtol,
                atol=0.0,
                M=preconditioner,
                restart=min(50, jacobian.shape[0]),
                maxiter=jacobian.shape[0],
            )
            if info == 0:
                return x
            logger.warning("Krylov solve did not converge, using direct solve", extra={"info": info})
        return np.atleast_1d(spsolve(jacobian.tocsc(), rhs))

    def _newton(self, system: StepSystem, u: np.ndarray) -> Tuple[bool, np.ndarray, SolveStats]:
        tol = self.config.newton_tol
        step_tol = np.sqrt(tol)
        F = system.residual(u)
        f_norm = float(np.abs(F).max())

        for iteration in range(1, self.config.newton_max_iter + 1):
            delta = self._linear_solve(system.jacobian(u), -F)
            if not np.all(np.isfinite(delta)):
                return False, u, SolveStats(iterations=iteration, residual=f_norm / system.scale)

            lam = 1.0
            trial = u + delta
            F_trial = system.residual(trial)
            if self.config.damping:
                while float(np.abs(F_trial).max()) > f_norm and lam > MIN_DAMPING:
                    lam *= 0.5
                    trial = u + lam * delta
                    F_trial = system.residual(trial)

            step = lam * float(np.abs(delta).max())
            u, F = trial, F_trial
            f_norm = float(np.abs(F).max())
            residual = f_norm / system.scale
            logger.debug(
                "Newton iteration",
                extra={"iteration": iteration, "residual": residual, "step": step, "damping": lam}
            )
            if not np.isfinite(residual):
                return False, u, SolveStats(iterations=iteration, residual=residual)
            if residual <= tol and step <= step_tol:
                return True, u, SolveStats(iterations=iteration, residual=residual)

        return False, u, SolveStats(iterations=self.config.newton_max_iter, residual=f_norm / system.scale)

    def _monotone(self, system: StepSystem, u: np.ndarray) -> Tuple[np.ndarray, int, float]:
        tol = self.config.newton_tol
        c = system.coefficient
        conductance = system.row_conductance()
        laplacian = system.mesh.graph_laplacian()
        coupled = conductance > 0
        lam = np.where(coupled, system.dt * conductance / (c * system.mesh.measures), 1.0)
        gain = system.dt / (c * system.mesh.measures)
        base = system.history / c

        residual: Optional[float] = None
        for sweep in range(1, self.config.monotone_max_sweeps + 1):
            psi_u = system.graph.psi(u)
            neighbour_flux = conductance * psi_u - laplacian @ psi_u
            y = base + gain * neighbour_flux
            updated = system.graph.resolvent_many(lam, y)
            u = np.where(coupled, updated, base)

            residual = system.residual_norm(u)
            if residual <= tol:
                logger.debug("Monotone iteration converged", extra={"sweeps": sweep, "residual": residual})
                return u, sweep, residual

        raise NewtonDivergenceError(
            "monotone iteration did not converge",
            details={"residual": residual, "sweeps": self.config.monotone_max_sweeps}
        )
