"""
Unit tests for discrete operators and probes.

Tests reconstruction, the diamond gradient, discrete norms, projections,
translate estimates, summation by parts and CSV persistence.
"""

import numpy as np
import pytest

from src.fvpme.core.exceptions import OutOfDomainError, UndefinedRatioError, ValidationError
from src.fvpme.discrete.fields import CellVector, SpaceTimeField, WeightField
from src.fvpme.discrete.io import read_cell_csv, write_cell_csv
from src.fvpme.discrete.operators import (
    discrete_gradient,
    gradient_l2_squared,
    gradient_sup_norm,
    norm_2T,
    norm_pm,
    project,
    reconstruct,
    seminorm_pmqn,
    space_time_lp_norm,
)
from src.fvpme.discrete.probes import (
    gradient_projection_bound,
    graph_compatibility_check,
    jensen_gap,
    summation_by_parts_residual,
    translate_estimate_probe,
    translate_sup,
)
from src.fvpme.graphs.piecewise import stefan_graph
from src.fvpme.time_algebra.grid import TimeGrid
from tests.fixtures.meshes import random_field


@pytest.mark.unit
@pytest.mark.parametrize("point,expected", [
    (0.25, 3.0),
    (0.5, 5.0),
    (0.75, 5.0),
    (1.0, 5.0),
])
def test_reconstruction_uses_half_open_cells(two_cell_mesh, point, expected):
    """Test that interior faces belong to the right cell and the last face to the last cell."""
    # ARRANGE
    v = CellVector(two_cell_mesh, [3.0, 5.0])

    # ACT & ASSERT
    assert reconstruct(v, [point]) == expected


@pytest.mark.unit
def test_reconstruction_outside_domain_raises(two_cell_mesh):
    """Test that points outside Omega are rejected."""
    # ACT & ASSERT
    with pytest.raises(OutOfDomainError):
        reconstruct(CellVector.zeros(two_cell_mesh), [1.5])


@pytest.mark.unit
def test_two_cell_gradient_and_norms(two_cell_mesh):
    """Test the gradient of (0, 1) on two cells: slope 2 and ||v||_2T^2 = 0.5 + 2."""
    # ARRANGE
    v = CellVector(two_cell_mesh, [0.0, 1.0])

    # ACT
    gradient = discrete_gradient(v)

    # ASSERT
    np.testing.assert_allclose(gradient.values, [[2.0]])
    assert gradient_sup_norm(two_cell_mesh, v.values) == pytest.approx(2.0)
    assert gradient_l2_squared(two_cell_mesh, v.values) == pytest.approx(2.0)
    assert norm_2T(v) == pytest.approx(np.sqrt(2.5))


@pytest.mark.unit
def test_gradient_is_collinear_with_normals(square_mesh, rng):
    """Test grad v on D_KL is parallel to n_KL and its L2 norm matches the tau form."""
    # ARRANGE
    v = CellVector(square_mesh, rng.normal(size=square_mesh.n_cells))

    # ACT
    gradient = discrete_gradient(v)

    # ASSERT
    assert gradient.collinearity_residual() <= 1e-12
    assert gradient.lp_norm(2.0) ** 2 == pytest.approx(gradient_l2_squared(square_mesh, v.values), rel=1e-12)


@pytest.mark.unit
def test_constant_vectors_have_zero_gradient(square_mesh):
    """Test that constants are in the kernel of the gradient."""
    # ARRANGE
    v = CellVector.constant(square_mesh, 2.5)

    # ASSERT
    assert discrete_gradient(v).sup_norm() == 0.0
    assert norm_2T(v) == pytest.approx(2.5)
    assert v.mass == pytest.approx(2.5)


@pytest.mark.unit
def test_norm_pm_at_two_matches_norm_2T(square_mesh, rng):
    """Test ||v||_{2,m} = ||v||_{2,T}."""
    # ARRANGE
    v = CellVector(square_mesh, rng.normal(size=square_mesh.n_cells))

    # ACT & ASSERT
    assert norm_pm(square_mesh, v, 2.0) == pytest.approx(norm_2T(v), rel=1e-12)


@pytest.mark.unit
def test_norm_pm_rejects_p_below_one(square_mesh):
    """Test the exponent precondition."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        norm_pm(square_mesh, np.zeros(square_mesh.n_cells), 0.5)


@pytest.mark.unit
def test_projection_of_quadratic_is_exact(two_cell_mesh):
    """Test cell averages of x^2 on two cells: 1/12 and 7/12."""
    # ACT
    averages = project(two_cell_mesh, lambda x: x[:, 0] ** 2)

    # ASSERT
    np.testing.assert_allclose(averages.values, [1.0 / 12.0, 7.0 / 12.0], rtol=1e-13)


@pytest.mark.unit
def test_jensen_gap_is_nonnegative(square_mesh):
    """Test int f^2 >= ||pi P f||^2."""
    # ACT
    gap = jensen_gap(square_mesh, lambda x: np.sin(3.0 * x[:, 0]) * np.exp(x[:, 1]))

    # ASSERT
    assert gap >= -1e-14


@pytest.mark.unit
@pytest.mark.parametrize("mesh_name", ["square_mesh", "interval_mesh"])
def test_projection_gradient_bound(mesh_name, request):
    """Test ||grad P phi||_inf <= d (1 + 2 rho) ||grad phi||_inf."""
    # ARRANGE
    mesh = request.getfixturevalue(mesh_name)

    # ACT
    lhs, rhs = gradient_projection_bound(mesh, lambda x: np.sin(2.0 * x[:, 0]), gradient_sup=2.0)

    # ASSERT
    assert lhs <= rhs


@pytest.mark.unit
def test_translate_of_constant_on_interval(two_cell_mesh):
    """Test ||pi v(. + s) - pi v||^2 = 2 s for v = 1 on [0, 1]."""
    # ARRANGE
    v = CellVector.constant(two_cell_mesh, 1.0)

    # ACT
    ratio = translate_estimate_probe(v, [0.25])

    # ASSERT
    assert ratio == pytest.approx(np.sqrt(0.5), rel=1e-12)


@pytest.mark.unit
def test_translate_ratio_of_zero_vector_is_undefined(two_cell_mesh):
    """Test that the ratio of the zero vector raises."""
    # ACT & ASSERT
    with pytest.raises(UndefinedRatioError):
        translate_estimate_probe(CellVector.zeros(two_cell_mesh), [0.1])


@pytest.mark.unit
def test_translate_sup_is_bounded_by_shift(square_mesh, rng):
    """Test the sampled ratio stays below a multiple of sqrt(|shift| (|shift| + 2h))."""
    # ARRANGE
    vectors = [CellVector(square_mesh, rng.normal(size=square_mesh.n_cells)) for _ in range(5)]
    shift = np.array([0.05, 0.02])
    size = np.linalg.norm(shift)

    # ACT
    worst = translate_sup(vectors, [shift, -shift])

    # ASSERT
    assert 0.0 < worst <= 10.0 * np.sqrt(size * (size + 2.0 * square_mesh.h))


@pytest.mark.unit
def test_graph_compatibility_with_stefan_segment(two_cell_mesh):
    """Test v_K in beta(u_K) on the vertical segment and off it."""
    # ARRANGE
    graph = stefan_graph(1.0)
    u = CellVector(two_cell_mesh, [0.0, 2.0])

    # ACT & ASSERT
    assert graph_compatibility_check(u, CellVector(two_cell_mesh, [0.5, 3.0]), graph)
    assert not graph_compatibility_check(u, CellVector(two_cell_mesh, [1.5, 3.0]), graph)


@pytest.mark.unit
def test_summation_by_parts_is_exact(square_mesh, rng):
    """Test the discrete integration by parts against X(x) theta(t) with theta(0) = theta(T) = 0."""
    # ARRANGE
    grid = TimeGrid.from_times([0.0, 0.1, 0.15, 0.4, 0.7, 1.0])
    field = random_field(square_mesh, grid, rng)

    # ACT
    residual, scale = summation_by_parts_residual(
        field,
        lambda x: np.cos(np.pi * x[:, 0]) + x[:, 1],
        lambda t: np.sin(np.pi * t),
        weights=WeightField(rng.uniform(0.5, 2.0, square_mesh.n_cells), lower=0.5, upper=2.0),
    )

    # ASSERT
    assert abs(residual) <= 1e-12 * max(scale, 1.0)


@pytest.mark.unit
def test_space_time_norms_of_constant_field(square_mesh):
    """Test ||u||_{L2(Q_T)} and the (2,m;2) seminorm for u = 1 on [0, 2]."""
    # ARRANGE
    grid = TimeGrid.uniform(2.0, 4)
    field = SpaceTimeField.constant_in_time(square_mesh, grid, np.ones(square_mesh.n_cells))

    # ACT & ASSERT
    assert space_time_lp_norm(field, 2.0) == pytest.approx(np.sqrt(2.0))
    assert seminorm_pmqn(field, 2.0, 2.0) == pytest.approx(np.sqrt(2.0))
    np.testing.assert_allclose(field.masses(), 1.0)


@pytest.mark.unit
@pytest.mark.parametrize("values", [
    [1.0],
    [1.0, np.nan],
])
def test_cell_vector_validation(two_cell_mesh, values):
    """Test the length and finiteness checks of cell vectors."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        CellVector(two_cell_mesh, values)


@pytest.mark.unit
def test_weights_outside_bounds_are_rejected():
    """Test the bounds of a weight field."""
    # ACT & ASSERT
    with pytest.raises(ValidationError):
        WeightField(np.array([0.5, 3.0]), lower=0.5, upper=2.0)


@pytest.mark.unit
def test_cell_csv_reads_back(tmp_path, square_mesh, rng):
    """Test that written cell vectors read back exactly."""
    # ARRANGE
    v = CellVector(square_mesh, rng.normal(size=square_mesh.n_cells))

    # ACT
    path = write_cell_csv(tmp_path / "u.csv", v)
    loaded = read_cell_csv(path, square_mesh)

    # ASSERT
    np.testing.assert_array_equal(loaded.values, v.values)


@pytest.mark.unit
@pytest.mark.parametrize("content", [
    "cell,value\n0,1\n1,2\n",
    "cell_id,value\n0,1\n",
    "cell_id,value\n0,1\n0,2\n",
    "cell_id,value\n0,1\n1,abc\n",
])
def test_malformed_cell_csv_is_rejected(tmp_path, two_cell_mesh, content):
    """Test header, coverage, repetition and value checks."""
    # ARRANGE
    path = tmp_path / "bad.csv"
    path.write_text(content)

    # ACT & ASSERT
    with pytest.raises(ValidationError):
        read_cell_csv(path, two_cell_mesh)
