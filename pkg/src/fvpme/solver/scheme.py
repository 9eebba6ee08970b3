"""
The fully discrete scheme: projection of the initial data, an implicit
Euler first step, then BDF2 steps (or implicit Euler throughout).
"""

import time
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from src.fvpme.core.enums import TimeRule
from src.fvpme.core.exceptions import FVPMEException, SolverError, UnsupportedGridError, ValidationError
from src.fvpme.core.logging import get_logger, run_context
from src.fvpme.discrete.fields import CellVector, SpaceTimeField
from src.fvpme.discrete.operators import project
from src.fvpme.graphs.power_law import PowerLaw
from src.fvpme.mesh.geometry import AdmissibleMesh
from src.fvpme.solver import estimates
from src.fvpme.solver.assembly import StepSystem, history_term, step_coefficient
from src.fvpme.solver.nonlinear import NonlinearSolver
from src.fvpme.solver.schemas import RunReport, SolveStats, SolverConfig, StepRecord
from src.fvpme.time_algebra.grid import TimeGrid

logger = get_logger(__name__)

InitialData = Union[CellVector, np.ndarray, Callable[[np.ndarray], np.ndarray]]

MASS_RTOL = 1e-10
ENERGY_RTOL = 1e-8
LEDGER_RTOL = 1e-9


def discretize_initial(mesh: AdmissibleMesh, u0_function: Callable[[np.ndarray], np.ndarray]) -> CellVector:
    """u_K^0 = (1/m_K) int_K u0."""
    return project(mesh, u0_function)


def _resolve_graph(config: SolverConfig, graph: Optional[PowerLaw]) -> PowerLaw:
    if graph is None:
        return PowerLaw(config.q)
    if not isinstance(graph, PowerLaw):
        raise ValidationError("the scheme is assembled for power-law nonlinearities")
    if graph.q != config.q:
        raise ValidationError(
            "graph exponent differs from the configured exponent",
            details={"graph_q": graph.q, "config_q": config.q}
        )
    return graph


def _solve_step(
    mesh: AdmissibleMesh,
    graph: PowerLaw,
    rule: TimeRule,
    dt: float,
    config: SolverConfig,
    u_km1: np.ndarray,
    u_km2: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, SolveStats]:
    system = StepSystem(
        mesh=mesh,
        graph=graph,
        dt=dt,
        coefficient=step_coefficient(rule),
        history=history_term(rule, u_km1, u_km2),
    )
    return NonlinearSolver(config).solve(system, u_km1)


def step_euler(
    u_prev: CellVector,
    dt: float,
    config: SolverConfig,
    graph: Optional[PowerLaw] = None
) -> CellVector:
    """
    One implicit Euler step.

    Raises:
        ValidationError: dt <= 0
        NewtonDivergenceError: no convergence after the fallback
    """
    graph = _resolve_graph(config, graph)
    values, _ = _solve_step(u_prev.mesh, graph, TimeRule.EULER, dt, config, u_prev.values)
    return CellVector(u_prev.mesh, values)


def step_bdf2(
    u_km1: CellVector,
    u_km2: CellVector,
    dt: float,
    config: SolverConfig,
    graph: Optional[PowerLaw] = None
) -> CellVector:
    """
    One BDF2 step from u^(k-1) and u^(k-2).

    Raises:
        ValidationError: dt <= 0 or states on different meshes
        NewtonDivergenceError: no convergence after the fallback
    """
    if u_km1.mesh is not u_km2.mesh:
        raise ValidationError("BDF2 history lives on different meshes")
    graph = _resolve_graph(config, graph)
    values, _ = _solve_step(u_km1.mesh, graph, TimeRule.BDF2, dt, config, u_km1.values, u_km2.values)
    return CellVector(u_km1.mesh, values)


def _initial_state(mesh: AdmissibleMesh, u0: InitialData) -> np.ndarray:
    if isinstance(u0, CellVector):
        return u0.values
    if callable(u0):
        return discretize_initial(mesh, u0).values
    return CellVector(mesh, np.asarray(u0, dtype=float)).values


def run(
    mesh: AdmissibleMesh,
    grid: TimeGrid,
    graph: Optional[PowerLaw],
    u0: InitialData,
    config: SolverConfig,
    run_id: Optional[str] = None
) -> Tuple[SpaceTimeField, RunReport]:
    """
    Run the scheme over the whole time grid.

    Args:
        mesh: admissible mesh
        grid: uniform time grid (any grid under the Euler rule)
        graph: power law; built from ``config.q`` when None
        u0: initial function, cell vector or raw cell values
        config: solver configuration
        run_id: identifier bound to the log records of this run

    Returns:
        The trajectory and its report

    Raises:
        UnsupportedGridError: nonuniform grid under the BDF2 rule
        SolverError: a step failed; ``details["step"]`` holds its index
    """
    rule = TimeRule(config.time_rule)
    if rule == TimeRule.BDF2 and not grid.is_uniform():
        raise UnsupportedGridError("BDF2 runs need a uniform time grid")
    graph = _resolve_graph(config, graph)

    with run_context(run_id) as rid:
        started = time.perf_counter()
        logger.info(
            "Starting run",
            extra={"cells": mesh.n_cells, "steps": grid.n, "q": graph.q, "rule": rule.value}
        )
        slots = [_initial_state(mesh, u0)]
        step_stats: List[SolveStats] = []

        for k in range(1, grid.n + 1):
            step_rule = TimeRule.EULER if k == 1 else rule
            previous = slots[-2] if step_rule == TimeRule.BDF2 else None
            try:
                values, stats = _solve_step(
                    mesh, graph, step_rule, float(grid.steps[k - 1]), config, slots[-1], previous
                )
            except FVPMEException as exc:
                logger.error("Step failed", extra={"step": k, "details": exc.details})
                raise SolverError(
                    f"step {k} failed: {exc.message}",
                    details={"step": k, **exc.details}
                ) from exc
            logger.debug(
                "Step solved",
                extra={"step": k, "iterations": stats.iterations, "residual": stats.residual}
            )
            slots.append(values)
            step_stats.append(stats)

        field = SpaceTimeField.from_slots(mesh, grid, slots)
        report = build_report(field, graph, config, step_stats, rid)
        report.wall_time = time.perf_counter() - started
        logger.info(
            "Run finished",
            extra={"wall_time": report.wall_time, "violations": len(report.violations)}
        )
    return field, report


def build_report(
    field: SpaceTimeField,
    graph: PowerLaw,
    config: SolverConfig,
    step_stats: List[SolveStats],
    run_id: str = ""
) -> RunReport:
    """Monitors of a trajectory; violated estimates are listed, not raised."""
    rule = TimeRule(config.time_rule)
    mesh, grid = field.mesh, field.grid
    masses = field.masses()
    drift = np.abs(masses - masses[0])
    energies = estimates.energy_functionals(field, graph, rule)
    flux_accumulated = np.concatenate([[0.0], np.cumsum(estimates.flux_l1_per_step(field, graph))])

    records = []
    for k in range(grid.n + 1):
        stats = step_stats[k - 1] if k >= 1 else SolveStats()
        records.append(StepRecord(
            step=k,
            time=float(grid.times[k]),
            mass=float(masses[k]),
            mass_drift=float(drift[k]),
            energy=energies[k].energy,
            energy_bound=energies[k].bound,
            flux_l1=float(flux_accumulated[k]),
            newton_iterations=stats.iterations,
            fallback_used=stats.fallback_used,
            residual=stats.residual,
        ))

    report = RunReport(
        run_id=run_id,
        q=graph.q,
        time_rule=rule,
        n_cells=mesh.n_cells,
        n_steps=grid.n,
        records=records,
        initial_l2_squared=float(mesh.measures @ field.values[0] ** 2),
        psi_l1=estimates.psi_l1_norm(field, graph),
        flux_l1=float(flux_accumulated[-1]),
        phi_l2=estimates.phi_l2_norm(field, graph),
        grad_phi_l2=estimates.grad_phi_l2_norm(field, graph),
        u_lq1=estimates.u_lq1_norm(field, graph),
        max_mass_drift=float(drift.max()),
    )
    report.violations = _violations(field, graph, energies, drift)
    for violation in report.violations:
        logger.warning("Estimate violated", extra={"estimate": violation})
    return report


def _violations(field, graph, energies, drift) -> List[str]:
    found = []
    mesh = field.mesh
    mass_tol = MASS_RTOL * float(mesh.measures @ np.abs(field.values[0]))
    bad_mass = np.nonzero(drift > mass_tol)[0]
    if bad_mass.size:
        found.append(f"mass drift at step {int(bad_mass[0])}")

    for record in energies:
        if record.energy - record.bound > ENERGY_RTOL * record.bound:
            found.append(f"energy bound at step {record.step}")
            break
    for record in energies:
        slack = record.ledger_slack
        if slack is None:
            continue
        scale = max(abs(record.bdf2_rhs or 0.0), abs(record.euler_rhs or 0.0), 1e-300)
        if slack < -LEDGER_RTOL * scale:
            found.append(f"energy ledger at step {record.step}")
            break

    if not estimates.mean_value_weights_ok(field, graph):
        found.append("mean-value weights")
    return found
