"""
Integration tests for the command-line flows.

Runs the example configurations through the entry point and reads the
written files back.
"""

import numpy as np
import pytest

from src.fvpme.cli.commands import build_mesh
from src.fvpme.cli.config_file import load_run_config
from src.fvpme.discrete.io import read_cell_csv, read_space_time_csv
from src.fvpme.main import main
from src.fvpme.time_algebra.grid import TimeGrid
from tests.conftest import EXAMPLES_DIR


@pytest.mark.integration
def test_barenblatt_example_run(out_dir):
    """Test the 1D Barenblatt example: files, conservation and energy bound."""
    # ARRANGE
    config_path = EXAMPLES_DIR / "barenblatt_1d.ini"
    config = load_run_config(config_path)
    mesh = build_mesh(config)
    grid = TimeGrid.uniform(config.time.T, config.time.n)

    # ACT
    code = main(["--out", str(out_dir), "run", str(config_path)])

    # ASSERT
    assert code == 0
    field = read_space_time_csv(out_dir / "barenblatt_trajectory.csv", mesh, grid)
    final = read_cell_csv(out_dir / "barenblatt_final.csv", mesh)
    np.testing.assert_array_equal(final.values, field.final.values)
    masses = field.masses()
    np.testing.assert_allclose(masses, masses[0], rtol=1e-10)
    assert masses[0] == pytest.approx(1.0, rel=1e-3)

    rows = [line.split(",") for line in (out_dir / "barenblatt_report.csv").read_text().splitlines()[1:]]
    assert len(rows) == grid.n + 1
    energy = np.array([float(r[4]) for r in rows])
    bound = np.array([float(r[5]) for r in rows])
    assert np.all(energy <= bound * (1.0 + 1e-8))
    flux = np.array([float(r[6]) for r in rows])
    assert np.all(np.diff(flux) >= 0.0)


@pytest.mark.integration
def test_strict_box_example(out_dir):
    """Test the 2D Krylov example under --strict."""
    # ACT
    code = main(["--strict", "--out", str(out_dir), "run", str(EXAMPLES_DIR / "box_2d.ini")])

    # ASSERT
    assert code == 0
    assert (out_dir / "box_report.csv").exists()


@pytest.mark.integration
def test_heat_example_convergence(out_dir):
    """Test the heat example study with dt ~ h^2 and nodal sampling."""
    # ACT
    code = main(["--out", str(out_dir), "converge", str(EXAMPLES_DIR / "heat_sine_1d.ini"), "--levels", "3"])

    # ASSERT
    assert code == 0
    lines = (out_dir / "heat_convergence.csv").read_text().splitlines()
    errors = [float(line.split(",")[4]) for line in lines[1:]]
    assert len(errors) == 3
    assert errors[2] < errors[1] < errors[0]


@pytest.mark.integration
def test_selftest_passes(out_dir, capsys):
    """Test the invariant battery and its norm table."""
    # ACT
    code = main(["--out", str(out_dir), "selftest"])

    # ASSERT
    assert code == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "n rule norm1_Ainv pass"
    assert "FAIL" not in out
    lines = (out_dir / "bdf2_norm_table.csv").read_text().splitlines()
    assert lines[0] == "n,rule,norm1_Ainv,pass"
    assert all(line.endswith(",true") for line in lines[1:])
