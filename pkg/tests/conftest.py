"""
Pytest configuration and fixtures.
"""

from pathlib import Path

import numpy as np
import pytest

from src.fvpme.cli.presets import PresetLibrary
from src.fvpme.graphs.power_law import PowerLaw
from src.fvpme.mesh.builders import build_uniform_grid
from src.fvpme.mesh.geometry import AdmissibleMesh

REPO_ROOT = Path(__file__).resolve().parents[1]
PRESETS_DIR = REPO_ROOT / "config" / "presets"
EXAMPLES_DIR = REPO_ROOT / "config" / "examples"


@pytest.fixture
def two_cell_mesh() -> AdmissibleMesh:
    """Unit interval split into two cells: m = 0.5, tau = 2."""
    return build_uniform_grid((0.0, 1.0), 2)


@pytest.fixture
def unit_square_2x1() -> AdmissibleMesh:
    """Unit square split into two rectangles along x."""
    return build_uniform_grid([(0.0, 1.0), (0.0, 1.0)], [2, 1])


@pytest.fixture
def interval_mesh() -> AdmissibleMesh:
    """32 cells on [-2, 2], the Barenblatt box."""
    return build_uniform_grid((-2.0, 2.0), 32)


@pytest.fixture
def square_mesh() -> AdmissibleMesh:
    """8 x 8 cells on the unit square."""
    return build_uniform_grid([(0.0, 1.0), (0.0, 1.0)], 8)


@pytest.fixture(params=[2.0, 3.0])
def power_law(request) -> PowerLaw:
    """Power laws of the oracle exponents."""
    return PowerLaw(request.param)


@pytest.fixture
def preset_library() -> PresetLibrary:
    """Library over the repository presets."""
    return PresetLibrary(PRESETS_DIR)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for random sweeps."""
    return np.random.default_rng(20240617)


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    """Temporary output directory."""
    target = tmp_path / "out"
    target.mkdir()
    return target
