"""
Unit tests for the fully discrete scheme.

Tests single steps against the two-cell oracle, the nonlinear solver paths,
conservation, the energy ledgers and the weak-form terms.
"""

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from src.fvpme.cli.selftest import two_cell_oracle
from src.fvpme.core.enums import LinearSolverKind, TimeRule
from src.fvpme.core.exceptions import NewtonDivergenceError, SolverError, UnsupportedGridError, ValidationError
from src.fvpme.discrete.fields import CellVector, SpaceTimeField
from src.fvpme.graphs.power_law import PowerLaw
from src.fvpme.mesh.builders import build_uniform_grid
from src.fvpme.solver.assembly import StepSystem, history_term
from src.fvpme.solver.estimates import (
    energy_functionals,
    mean_value_weights,
    mean_value_weights_ok,
    time_derivative_bound,
    weak_form_residual,
)
from src.fvpme.solver.nonlinear import NonlinearSolver
from src.fvpme.solver.schemas import SolveStats, SolverConfig
from src.fvpme.solver.scheme import build_report, run, step_bdf2, step_euler
from src.fvpme.time_algebra.grid import TimeGrid


def _bump(points: np.ndarray) -> np.ndarray:
    return np.maximum(0.0, 1.0 - 4.0 * np.sum((points - 0.5) ** 2, axis=1))


def _test_function(points: np.ndarray, t: float) -> np.ndarray:
    return np.sin(np.pi * points[:, 0]) * (1.0 - t)


@pytest.mark.unit
@pytest.mark.parametrize("q", [2.0, 3.0])
def test_euler_step_matches_two_cell_oracle(two_cell_mesh, q):
    """Test u = (1, 0), dt = 0.1 on two cells against elimination and bracketing."""
    # ARRANGE
    u_prev = CellVector(two_cell_mesh, [1.0, 0.0])
    expected = two_cell_oracle(q, [0.5, 0.5], 2.0, 0.1, 1.0, [1.0, 0.0])

    # ACT
    u = step_euler(u_prev, 0.1, SolverConfig(q=q))

    # ASSERT
    np.testing.assert_allclose(u.values, expected, atol=1e-10)
    assert u.mass == pytest.approx(0.5, abs=1e-12)


@pytest.mark.unit
def test_bdf2_step_matches_two_cell_oracle(two_cell_mesh):
    """Test one BDF2 step with history 2 u^(k-1) - u^(k-2) / 2."""
    # ARRANGE
    u_km2 = CellVector(two_cell_mesh, [1.0, 0.0])
    u_km1 = CellVector(two_cell_mesh, [0.8, 0.2])
    history = history_term(TimeRule.BDF2, u_km1.values, u_km2.values)
    expected = two_cell_oracle(2.0, [0.5, 0.5], 2.0, 0.1, 1.5, history)

    # ACT
    u = step_bdf2(u_km1, u_km2, 0.1, SolverConfig(q=2.0))

    # ASSERT
    np.testing.assert_allclose(u.values, expected, atol=1e-10)


@pytest.mark.unit
def test_linear_mode_matches_linear_solve(square_mesh, rng):
    """Test q = 1 against (m / dt + L) u = m / dt u_prev."""
    # ARRANGE
    u_prev = CellVector(square_mesh, rng.uniform(0.0, 1.0, square_mesh.n_cells))
    dt = 0.01
    matrix = np.diag(square_mesh.measures / dt) + square_mesh.graph_laplacian().toarray()

    # ACT
    u = step_euler(u_prev, dt, SolverConfig(q=1.0))

    # ASSERT
    np.testing.assert_allclose(u.values, np.linalg.solve(matrix, square_mesh.measures / dt * u_prev.values),
                               atol=1e-10)


@pytest.mark.unit
def test_step_rejects_nonpositive_dt(two_cell_mesh):
    """Test the time step precondition."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        step_euler(CellVector(two_cell_mesh, [1.0, 0.0]), 0.0, SolverConfig(q=2.0))


@pytest.mark.unit
def test_bdf2_history_is_required():
    """Test that a BDF2 step without u^(k-2) is refused."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        history_term(TimeRule.BDF2, np.zeros(2))


@pytest.mark.unit
def test_graph_exponent_must_match_config(two_cell_mesh):
    """Test that a mismatched power law is rejected."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        step_euler(CellVector(two_cell_mesh, [1.0, 0.0]), 0.1, SolverConfig(q=2.0), graph=PowerLaw(3.0))


@pytest.mark.unit
def test_custom_rule_is_not_a_run_rule():
    """Test that runs accept the built rules only."""
    # ACT & ASSERT
    with pytest.raises(PydanticValidationError):
        SolverConfig(q=2.0, time_rule="custom")


@pytest.mark.unit
@pytest.mark.parametrize("overrides", [
    {"newton_max_iter": 0},
    {"linear_solver": LinearSolverKind.KRYLOV},
    {"damping": False},
])
def test_solver_paths_agree(square_mesh, overrides):
    """Test that monotone, Krylov and undamped paths reach the direct Newton solution."""
    # ARRANGE
    graph = PowerLaw(2.0)
    u_prev = CellVector(square_mesh, 0.5 + 0.5 * np.cos(np.arange(square_mesh.n_cells)))
    system = StepSystem(square_mesh, graph, 0.01, 1.0, u_prev.values)
    reference, _ = NonlinearSolver(SolverConfig(q=2.0)).solve(system, u_prev.values)

    # ACT
    u, stats = NonlinearSolver(SolverConfig(q=2.0, **overrides)).solve(system, u_prev.values)

    # ASSERT
    np.testing.assert_allclose(u, reference, atol=1e-9)
    assert stats.residual <= 1e-11
    if "newton_max_iter" in overrides:
        assert stats.sweeps > 0
        assert stats.iterations == 0


@pytest.mark.unit
def test_exhausted_fallback_raises(two_cell_mesh):
    """Test that a monotone iteration without enough sweeps fails loudly."""
    # ARRANGE
    config = SolverConfig(q=2.0, newton_max_iter=0, monotone_max_sweeps=1)
    system = StepSystem(two_cell_mesh, PowerLaw(2.0), 0.1, 1.0, np.array([1.0, 0.0]))

    # ACT & ASSERT
    with pytest.raises(NewtonDivergenceError):
        NonlinearSolver(config).solve(system, np.array([1.0, 0.0]))


@pytest.mark.unit
def test_failed_step_is_reported_with_its_index(two_cell_mesh):
    """Test that run wraps a solver failure with the step number."""
    # ARRANGE
    config = SolverConfig(q=2.0, newton_max_iter=0, monotone_max_sweeps=1)

    # ACT & ASSERT
    with pytest.raises(SolverError) as exc_info:
        run(two_cell_mesh, TimeGrid.uniform(0.1, 2), None, np.array([1.0, 0.0]), config)
    assert exc_info.value.details["step"] == 1


@pytest.mark.unit
def test_bdf2_run_needs_uniform_grid(two_cell_mesh):
    """Test that BDF2 runs refuse variable steps while Euler runs accept them."""
    # ARRANGE
    grid = TimeGrid.from_times([0.0, 0.05, 0.2])
    u0 = np.array([1.0, 0.0])

    # ACT & ASSERT
    with pytest.raises(UnsupportedGridError):
        run(two_cell_mesh, grid, None, u0, SolverConfig(q=2.0))
    field, _ = run(two_cell_mesh, grid, None, u0, SolverConfig(q=2.0, time_rule=TimeRule.EULER))
    assert field.n == 2


@pytest.mark.unit
def test_constant_data_is_stationary(square_mesh):
    """Test that constants are steady states with zero flux."""
    # ACT
    field, report = run(square_mesh, TimeGrid.uniform(0.5, 5), None, CellVector.constant(square_mesh, 0.7),
                        SolverConfig(q=2.0))

    # ASSERT
    np.testing.assert_allclose(field.values, 0.7, atol=1e-12)
    assert report.flux_l1 == 0.0
    assert report.violations == []


@pytest.mark.unit
@pytest.mark.parametrize("rule", [TimeRule.BDF2, TimeRule.EULER])
def test_run_conserves_mass_and_respects_energy(square_mesh, rule):
    """Test mass, the energy bound 2 ||u0||^2 and the step ledgers on a bump."""
    # ARRANGE
    config = SolverConfig(q=2.0, time_rule=rule)
    grid = TimeGrid.uniform(0.1, 10)

    # ACT
    field, report = run(square_mesh, grid, None, _bump, config)

    # ASSERT
    assert report.max_mass_drift <= 1e-10 * float(square_mesh.measures @ np.abs(field.values[0]))
    assert report.violations == []
    assert len(report.records) == grid.n + 1
    for record in energy_functionals(field, PowerLaw(2.0), rule):
        assert record.energy <= record.bound * (1.0 + 1e-8)
        if record.ledger_slack is not None:
            assert record.ledger_slack >= -1e-9 * max(1.0, record.bound)


@pytest.mark.unit
def test_report_accumulates_flux(square_mesh):
    """Test that the last record carries the total flux L1 norm."""
    # ACT
    _, report = run(square_mesh, TimeGrid.uniform(0.05, 4), None, _bump, SolverConfig(q=3.0))

    # ASSERT
    assert report.records[0].flux_l1 == 0.0
    assert report.records[-1].flux_l1 == pytest.approx(report.flux_l1)
    flux = [record.flux_l1 for record in report.records]
    assert flux == sorted(flux)
    assert report.psi_l1 > 0.0 and report.u_lq1 > 0.0


@pytest.mark.unit
@pytest.mark.parametrize("rule", [TimeRule.BDF2, TimeRule.EULER])
def test_weak_form_terms_cancel(interval_mesh, rule):
    """Test A + B + C = 0 up to the solve residual."""
    # ARRANGE
    def test_function(points, t):
        return np.cos(0.25 * np.pi * points[:, 0]) * (0.2 - t)

    field, _ = run(interval_mesh, TimeGrid.uniform(0.2, 8), None, lambda x: np.maximum(0.0, 1.0 - x[:, 0] ** 2),
                   SolverConfig(q=2.0, time_rule=rule))

    # ACT
    terms = weak_form_residual(field, test_function, PowerLaw(2.0), rule)

    # ASSERT
    assert abs(terms.total) <= 1e-8 * max(terms.scale, 1.0)
    assert terms.total == pytest.approx(terms.A + terms.B + terms.C)
    if rule == TimeRule.EULER:
        assert terms.C == pytest.approx(0.0, abs=1e-12 * max(terms.scale, 1.0))


@pytest.mark.unit
def test_time_derivative_is_bounded_by_flux(square_mesh):
    """Test |int int deltahat(u) P phi| <= (1/d) ||grad psi(u)||_L1 ||grad P phi||_inf."""
    # ARRANGE
    field, _ = run(square_mesh, TimeGrid.uniform(0.1, 6), None, _bump, SolverConfig(q=2.0))

    # ACT
    lhs, rhs = time_derivative_bound(field, _test_function, PowerLaw(2.0))

    # ASSERT
    assert lhs <= rhs * (1.0 + 1e-8) + 1e-12


@pytest.mark.unit
def test_mean_value_weights_within_bounds(square_mesh):
    """Test 0 <= eta_KL <= sqrt(q) max(|u_K|, |u_L|)^((q-1)/2) along a run."""
    # ARRANGE
    field, _ = run(square_mesh, TimeGrid.uniform(0.1, 4), None, _bump, SolverConfig(q=3.0))

    # ASSERT
    assert mean_value_weights_ok(field, PowerLaw(3.0))


@pytest.mark.unit
@pytest.mark.parametrize("u_pair", [
    [0.8694791093638491, 0.869479109363849],
    [0.5, 0.5 * (1.0 + 1e-7)],
    [0.3, 0.3],
])
def test_mean_value_weights_on_nearly_equal_neighbours(two_cell_mesh, u_pair):
    """Test that neighbours one ulp or a few digits apart stay within the weight bound."""
    # ARRANGE
    grid = TimeGrid.uniform(0.1, 1)
    field = SpaceTimeField(two_cell_mesh, grid, np.array([[1.0, 0.0], u_pair]))
    graph = PowerLaw(3.0)

    # ACT
    eta, upper = mean_value_weights(field, graph)

    # ASSERT
    assert mean_value_weights_ok(field, graph)
    assert np.all(eta <= upper * (1.0 + 1e-7))
    assert eta[0, 0] == pytest.approx(np.sqrt(3.0) * u_pair[0], rel=1e-6)


@pytest.mark.unit
@pytest.mark.parametrize("rule", [TimeRule.BDF2, TimeRule.EULER])
def test_fine_bump_run_reports_no_violations(rule):
    """Test a 16 x 16 cubic run whose smooth plateau has ulp-adjacent neighbours."""
    # ARRANGE
    mesh = build_uniform_grid([(0.0, 1.0), (0.0, 1.0)], 16)

    # ACT
    _, report = run(mesh, TimeGrid.uniform(0.1, 20), None, _bump, SolverConfig(q=3.0, time_rule=rule))

    # ASSERT
    assert report.violations == []


@pytest.mark.unit
@pytest.mark.parametrize("shift,flagged", [
    (3e-10, True),
    (5e-11, False),
])
def test_mass_drift_bound_is_relative_to_initial_mass(two_cell_mesh, shift, flagged):
    """Test the mass drift limit 1e-10 sum m_K |u_K^0| on a unit-mass trajectory."""
    # ARRANGE
    grid = TimeGrid.uniform(0.1, 1)
    field = SpaceTimeField(two_cell_mesh, grid, np.array([[1.0, 1.0], [1.0 + shift, 1.0 + shift]]))

    # ACT
    report = build_report(field, PowerLaw(2.0), SolverConfig(q=2.0, time_rule=TimeRule.EULER), [SolveStats()])

    # ASSERT
    assert ("mass drift at step 1" in report.violations) is flagged
