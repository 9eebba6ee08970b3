"""
Unit tests for admissible meshes.

Tests builders, geometric quantities, validation and the mesh file format.
"""

import numpy as np
import pytest

from src.fvpme.core.exceptions import InvalidGeometryError, MeshFormatError, OrthogonalityError
from src.fvpme.mesh.builders import build_uniform_grid, refine_uniform
from src.fvpme.mesh.io import format_mesh, load_mesh, parse_mesh, write_mesh
from src.fvpme.mesh.validation import validate_admissible
from tests.fixtures.meshes import (
    BAD_HEADER,
    EMPTY_MESH,
    THREE_CELL_1D,
    THREE_D_HEADER,
    TWO_CELL_2D,
    TWO_CELL_2D_SKEWED,
)


@pytest.mark.unit
def test_two_rectangles_interface_geometry(unit_square_2x1):
    """Test the interface of the unit square split in two."""
    # ACT
    mesh = unit_square_2x1

    # ASSERT
    assert mesh.n_cells == 2
    assert mesh.n_interfaces == 1
    np.testing.assert_allclose(mesh.centers, [[0.25, 0.5], [0.75, 0.5]])
    assert mesh.iface_measures[0] == pytest.approx(1.0)
    assert mesh.iface_distances[0] == pytest.approx(0.5)
    assert mesh.transmissibilities[0] == pytest.approx(2.0)


@pytest.mark.unit
def test_two_rectangles_regularity(unit_square_2x1):
    """Test rho = 1 * 0.5 / 0.5 + sqrt(1.25) / 0.5."""
    # ASSERT
    assert unit_square_2x1.rho == pytest.approx(1.0 + np.sqrt(1.25) / 0.5, rel=1e-12)


@pytest.mark.unit
def test_two_rectangles_diamond_measure(unit_square_2x1):
    """Test meas(D_KL) = m_KL |x_K - x_L| / d = 0.25."""
    # ACT
    report = validate_admissible(unit_square_2x1)

    # ASSERT
    assert unit_square_2x1.diamond_measures[0] == pytest.approx(0.25)
    assert report.check("diamond_identity").passed


@pytest.mark.unit
def test_single_interval_has_no_interfaces():
    """Test the one-cell unit interval."""
    # ACT
    mesh = build_uniform_grid((0.0, 1.0), 1)

    # ASSERT
    assert mesh.n_interfaces == 0
    assert mesh.h == pytest.approx(1.0)
    assert validate_admissible(mesh).passed


@pytest.mark.unit
@pytest.mark.parametrize("box", [
    [(0.0, 0.0)],
    [(1.0, 0.0)],
    [(0.0, 1.0), (0.0, -1.0)],
])
def test_degenerate_box_is_rejected(box):
    """Test that zero or negative extents raise an invalid-geometry error."""
    # ACT & ASSERT
    with pytest.raises(InvalidGeometryError):
        build_uniform_grid(box, 2)


@pytest.mark.unit
def test_uniform_square_passes_every_check():
    """Test a 4 x 4 grid of the unit square."""
    # ARRANGE
    mesh = build_uniform_grid([(0.0, 1.0), (0.0, 1.0)], 4)

    # ACT
    report = validate_admissible(mesh)

    # ASSERT
    assert report.passed
    assert report.failures() == []
    # Interior cells have four neighbours: 4 * (0.25 * 0.25 / 0.0625 + sqrt(2) * 0.25 / 0.25)
    assert report.rho == pytest.approx(4.0 * (1.0 + np.sqrt(2.0)), rel=1e-12)


@pytest.mark.unit
@pytest.mark.parametrize("box,cells", [
    ((0.0, 1.0), 8),
    ([(0.0, 1.0), (0.0, 2.0)], [4, 8]),
])
def test_refinement_halves_h_and_keeps_rho(box, cells):
    """Test scale invariance of rho under uniform refinement."""
    # ARRANGE
    mesh = build_uniform_grid(box, cells)

    # ACT
    fine = refine_uniform(mesh)

    # ASSERT
    assert fine.n_cells == mesh.n_cells * 2 ** mesh.dim
    assert fine.h == pytest.approx(mesh.h / 2.0)
    assert fine.rho == pytest.approx(mesh.rho)


@pytest.mark.unit
def test_measures_sum_to_domain(square_mesh):
    """Test sum m_K = meas(Omega) and the diamond cover bound."""
    # ASSERT
    assert square_mesh.measures.sum() == pytest.approx(1.0, rel=1e-12)
    assert square_mesh.diamond_measures.sum() <= 1.0 + 1e-12


@pytest.mark.unit
def test_interface_table_is_symmetric(square_mesh):
    """Test that n_LK = -n_KL and lookups work in either order."""
    # ARRANGE
    k, l = (int(c) for c in square_mesh.iface_cells[3])

    # ASSERT
    assert square_mesh.interface_index(k, l) == square_mesh.interface_index(l, k)
    np.testing.assert_allclose(square_mesh.oriented_normal(k, l), -square_mesh.oriented_normal(l, k))


@pytest.mark.unit
def test_graph_laplacian_annihilates_constants(square_mesh):
    """Test row sums of the transmissibility Laplacian."""
    # ACT
    laplacian = square_mesh.graph_laplacian()

    # ASSERT
    np.testing.assert_allclose(laplacian @ np.ones(square_mesh.n_cells), 0.0, atol=1e-12)
    np.testing.assert_allclose(laplacian.diagonal().sum(), 2.0 * square_mesh.transmissibilities.sum())


@pytest.mark.unit
def test_parse_matches_builder(unit_square_2x1):
    """Test that the two-rectangle file gives the builder's transmissibilities."""
    # ACT
    mesh = parse_mesh(TWO_CELL_2D)

    # ASSERT
    np.testing.assert_allclose(mesh.transmissibilities, unit_square_2x1.transmissibilities)
    np.testing.assert_allclose(mesh.measures, unit_square_2x1.measures)


@pytest.mark.unit
def test_skewed_center_raises_orthogonality_error(tmp_path):
    """Test that an off-line center is reported with its interface."""
    # ARRANGE
    path = tmp_path / "skewed.mesh"
    path.write_text(TWO_CELL_2D_SKEWED)

    # ACT & ASSERT
    with pytest.raises(OrthogonalityError) as exc_info:
        load_mesh(path)
    assert exc_info.value.details["interface"] == "interface 0"


@pytest.mark.unit
def test_skewed_center_fails_validation_report():
    """Test that validation reports instead of raising."""
    # ACT
    report = validate_admissible(parse_mesh(TWO_CELL_2D_SKEWED))

    # ASSERT
    assert not report.passed
    assert report.check("orthogonality").status == "fail"


@pytest.mark.unit
def test_empty_cell_list_is_invalid_geometry():
    """Test that a mesh without cells is rejected."""
    # ACT & ASSERT
    with pytest.raises(InvalidGeometryError):
        parse_mesh(EMPTY_MESH)


@pytest.mark.unit
@pytest.mark.parametrize("text,line", [
    (BAD_HEADER, 1),
    (THREE_D_HEADER, 1),
    ("", 0),
])
def test_format_errors_carry_line_numbers(text, line):
    """Test parse errors with their line number."""
    # ACT & ASSERT
    with pytest.raises(MeshFormatError) as exc_info:
        parse_mesh(text)
    assert exc_info.value.details["line"] == line


@pytest.mark.unit
def test_nonuniform_1d_mesh_is_admissible():
    """Test a 1D file whose centers are not midpoints."""
    # ACT
    mesh = parse_mesh(THREE_CELL_1D)
    report = validate_admissible(mesh)

    # ASSERT
    assert report.passed
    np.testing.assert_allclose(mesh.iface_distances, [0.25, 0.45])
    assert not mesh.is_cartesian


@pytest.mark.unit
def test_written_mesh_reloads_identically(tmp_path, square_mesh):
    """Test that write_mesh output parses back to the same geometry."""
    # ACT
    path = write_mesh(square_mesh, tmp_path / "square.mesh")
    reloaded = load_mesh(path)

    # ASSERT
    assert format_mesh(reloaded) == format_mesh(square_mesh)
    np.testing.assert_allclose(reloaded.transmissibilities, square_mesh.transmissibilities)
