"""
Unit tests for the convergence lab.

Tests the exact references, error metrics, refinement bookkeeping and the
compactness probe.
"""

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from src.fvpme.core.enums import CouplingRule, ErrorSampling, TimeRule
from src.fvpme.core.exceptions import ValidationError
from src.fvpme.discrete.fields import SpaceTimeField
from src.fvpme.discrete.operators import project
from src.fvpme.graphs.power_law import PowerLaw
from src.fvpme.lab.compactness import compactness_probe, dual_test_battery
from src.fvpme.lab.errors import space_time_errors, trajectory_error
from src.fvpme.lab.references import (
    barenblatt,
    barenblatt_constant,
    heat_sine,
    interior_samples,
    mesh_box,
    pde_residual,
)
from src.fvpme.lab.refinement import (
    ConvergenceRow,
    ConvergenceTable,
    observed_order,
    refinement_study,
    run_levels,
    steps_for_level,
)
from src.fvpme.mesh.builders import build_uniform_grid
from src.fvpme.solver.schemas import SolverConfig
from src.fvpme.solver.scheme import run
from src.fvpme.time_algebra.grid import TimeGrid


@pytest.mark.unit
def test_barenblatt_constants_in_1d():
    """Test C and the support radius at t = 0.1 for q = 2, t0 = 0.1, unit mass."""
    # ACT
    reference = barenblatt(2.0, 1, t0=0.1)

    # ASSERT
    assert reference.params["C"] == pytest.approx(0.3605, abs=5e-4)
    assert barenblatt_constant(2.0, 1) == pytest.approx(reference.params["C"])
    assert reference.params["alpha"] == pytest.approx(1.0 / 3.0)
    assert reference.params["kappa"] == pytest.approx(1.0 / 12.0)
    assert reference.support_radius(0.1) == pytest.approx(1.217, abs=1e-3)


@pytest.mark.unit
@pytest.mark.parametrize("q,d", [(2.0, 1), (3.0, 1), (2.0, 2)])
def test_barenblatt_mass_is_conserved(q, d):
    """Test that the profile carries the requested mass at every time."""
    # ARRANGE
    mesh = build_uniform_grid([(-2.0, 2.0)] * d, 2000 if d == 1 else 200)
    reference = barenblatt(q, d, t0=0.1, mass=0.5)

    # ACT
    masses = [project(mesh, reference.at(t)).mass for t in (0.0, 0.3)]

    # ASSERT
    assert masses == pytest.approx([0.5, 0.5], rel=1e-4)


@pytest.mark.unit
@pytest.mark.parametrize("kwargs", [
    {"q": 1.0, "d": 1, "t0": 0.1},
    {"q": 2.0, "d": 3, "t0": 0.1},
    {"q": 2.0, "d": 1, "t0": 0.0},
    {"q": 2.0, "d": 1, "t0": 0.1, "mass": -1.0},
])
def test_barenblatt_preconditions(kwargs):
    """Test q > 1, d in {1, 2}, t0 > 0 and positive mass."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        barenblatt(**kwargs)


@pytest.mark.unit
def test_support_certificate():
    """Test that the support must stay inside the box over the horizon."""
    # ARRANGE
    reference = barenblatt(2.0, 1, t0=0.1)

    # ASSERT
    assert reference.certificate((np.array([-2.0]), np.array([2.0])), 0.1)
    assert not reference.certificate((np.array([-1.0]), np.array([1.0])), 0.1)


@pytest.mark.unit
@pytest.mark.parametrize("q,d", [(2.0, 1), (3.0, 2)])
def test_barenblatt_solves_the_equation(q, d, rng):
    """Test the relative PDE residual at interior points of the support."""
    # ARRANGE
    reference = barenblatt(q, d, t0=0.1)
    points = interior_samples(reference, 0.05, 50, rng)

    # ACT
    residual = pde_residual(reference, points, 0.05)

    # ASSERT
    assert residual.max() <= 1e-3


@pytest.mark.unit
def test_heat_sine_solves_the_heat_equation(rng):
    """Test the cosine mode against d_t u = u''."""
    # ARRANGE
    reference = heat_sine((np.array([0.0]), np.array([1.0])), amplitude=0.5, offset=1.0, mode=2)
    points = rng.uniform(0.05, 0.95, size=(40, 1))

    # ACT
    residual = pde_residual(reference, points, 0.02)

    # ASSERT
    assert residual.max() <= 1e-3
    assert reference.certificate((np.array([0.0]), np.array([1.0])), 10.0)


@pytest.mark.unit
@pytest.mark.parametrize("sampling", [ErrorSampling.GAUSS, ErrorSampling.NODAL])
def test_errors_of_a_shifted_constant(square_mesh, sampling):
    """Test errors of u = 1.1 against the reference 1 on [0, 2]."""
    # ARRANGE
    grid = TimeGrid.uniform(2.0, 4)
    field = SpaceTimeField.constant_in_time(square_mesh, grid, np.full(square_mesh.n_cells, 1.1))
    reference = heat_sine(mesh_box(square_mesh), amplitude=0.0, offset=1.0)

    # ACT
    errors = space_time_errors(field, reference, sampling)

    # ASSERT
    assert errors.l2_qt == pytest.approx(np.sqrt(2.0) * 0.1)
    assert errors.l1_qt == pytest.approx(0.2)
    assert errors.linf_l2 == pytest.approx(0.1)


@pytest.mark.unit
def test_trajectory_error_needs_refining_grid(two_cell_mesh):
    """Test the step-count compatibility check."""
    # ARRANGE
    coarse = SpaceTimeField.constant_in_time(two_cell_mesh, TimeGrid.uniform(1.0, 3), np.zeros(2))
    fine = SpaceTimeField.constant_in_time(two_cell_mesh, TimeGrid.uniform(1.0, 8), np.zeros(2))

    # ACT & ASSERT
    with pytest.raises(ValidationError):
        trajectory_error(coarse, fine)


@pytest.mark.unit
def test_trajectory_error_at_shared_times(two_cell_mesh):
    """Test the L_inf(0,T;L2) distance at the coarse times."""
    # ARRANGE
    coarse_grid, fine_grid = TimeGrid.uniform(1.0, 2), TimeGrid.uniform(1.0, 4)
    coarse = SpaceTimeField(two_cell_mesh, coarse_grid, np.outer(coarse_grid.times, [1.0, 1.0]))
    fine = SpaceTimeField(two_cell_mesh, fine_grid, np.outer(fine_grid.times, [1.0, 1.0]) + 0.5)

    # ACT
    errors = trajectory_error(coarse, fine)

    # ASSERT
    assert errors.linf_l2 == pytest.approx(0.5)


@pytest.mark.unit
@pytest.mark.parametrize("coarse,fine,expected", [
    (4.0, 1.0, 2.0),
    (1.0, 0.5, 1.0),
    (0.0, 1.0, None),
    (1.0, 0.0, None),
])
def test_observed_order(coarse, fine, expected):
    """Test log(e_coarse / e_fine) / log 2 and its undefined cases."""
    # ACT
    order = observed_order(coarse, fine)

    # ASSERT
    assert order == (pytest.approx(expected) if expected is not None else None)


@pytest.mark.unit
@pytest.mark.parametrize("coupling,expected", [
    (CouplingRule.H, 32),
    (CouplingRule.H2, 128),
])
def test_steps_for_level(coupling, expected):
    """Test dt ~ h doubles and dt ~ h^2 quadruples the step count per level."""
    # ASSERT
    assert steps_for_level(8, 2, coupling) == expected


@pytest.mark.unit
def test_table_rejects_non_refining_rows():
    """Test that h and dt must decrease across rows."""
    # ARRANGE
    row = dict(cells=8, n_steps=4, err_l2_qt=1.0, err_l1_qt=1.0, err_linf_l2=1.0)

    # ACT & ASSERT
    with pytest.raises(PydanticValidationError):
        ConvergenceTable(
            reference="barenblatt",
            coupling=CouplingRule.H,
            rows=[ConvergenceRow(level=0, h=0.1, dt=0.1, **row), ConvergenceRow(level=1, h=0.1, dt=0.05, **row)],
        )


@pytest.mark.unit
@pytest.mark.parametrize("levels,q,T", [
    (1, 2.0, 0.1),
    (2, 2.0, 0.1),
    (3, 3.0, 0.1),
    (3, 2.0, 2.0),
])
def test_run_levels_preconditions(interval_mesh, levels, q, T):
    """Test the level count, exponent match and support certificate."""
    # ARRANGE
    reference = barenblatt(2.0, 1, t0=0.1)

    # ACT & ASSERT
    with pytest.raises(ValidationError):
        run_levels(interval_mesh, levels, CouplingRule.H, reference, SolverConfig(q=q), T, 4)


@pytest.mark.unit
def test_small_refinement_study():
    """Test a three-level heat study with dt ~ h^2."""
    # ARRANGE
    mesh = build_uniform_grid((0.0, 1.0), 8)
    reference = heat_sine(mesh_box(mesh))

    # ACT
    table = refinement_study(mesh, 3, CouplingRule.H2, reference, SolverConfig(q=1.0), 0.05, 2)

    # ASSERT
    assert [row.cells for row in table.rows] == [8, 16, 32]
    assert [row.n_steps for row in table.rows] == [2, 8, 32]
    assert table.is_decreasing()
    assert table.rows[0].order_l2 is None
    assert all(row.order_l2 > 0.5 for row in table.rows[1:])
    assert table.reference == "heat_sine"


@pytest.mark.unit
def test_dual_battery_vanishes_at_final_time(square_mesh):
    """Test twelve test functions, each zero at t = T."""
    # ARRANGE
    points = square_mesh.centers

    # ACT
    battery = dual_test_battery(mesh_box(square_mesh), 0.5)

    # ASSERT
    assert len(battery) == 12
    for function in battery:
        np.testing.assert_allclose(function(points, 0.5), 0.0, atol=1e-15)


@pytest.mark.unit
@pytest.mark.parametrize("rule", [TimeRule.BDF2, TimeRule.EULER])
def test_compactness_probe_on_a_run(interval_mesh, rule):
    """Test the dual estimate and the weak-form ratio on a Barenblatt run."""
    # ARRANGE
    reference = barenblatt(2.0, 1, t0=0.1)
    field, _ = run(interval_mesh, TimeGrid.uniform(0.1, 8), None, reference.at(0.0),
                   SolverConfig(q=2.0, time_rule=rule))

    # ACT
    report = compactness_probe(field, PowerLaw(2.0), rule)

    # ASSERT
    assert report.dual_estimate_holds
    assert report.weak_form_max_ratio <= 1e-8
    assert [m.shift for m in report.translate_moduli] == pytest.approx([0.125, 0.25, 0.5])
    moduli = [m.value for m in report.translate_moduli]
    assert moduli == sorted(moduli)
