"""
Admissible mesh package.
"""

from src.fvpme.mesh.geometry import AdmissibleMesh, CartesianStructure, locate_points
from src.fvpme.mesh.builders import assemble_mesh, build_uniform_grid, refine_uniform
from src.fvpme.mesh.validation import validate_admissible
from src.fvpme.mesh.io import load_mesh, parse_mesh, write_mesh
from src.fvpme.mesh.schemas import ValidationReport

__all__ = [
    "AdmissibleMesh",
    "CartesianStructure",
    "locate_points",
    "assemble_mesh",
    "build_uniform_grid",
    "refine_uniform",
    "validate_admissible",
    "load_mesh",
    "parse_mesh",
    "write_mesh",
    "ValidationReport",
]
