"""
Plain-text mesh reader and writer.

Grammar (see mesh/README.md)::

    # comment
    <dim> <n_cells> <n_interfaces>
    <id> <x_1> ... <x_dim> <measure> : <vertex coordinates ...>
    <idK> <idL> <measure>
"""

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from src.fvpme.config import settings
from src.fvpme.core.exceptions import MeshFormatError, OrthogonalityError
from src.fvpme.core.logging import get_logger
from src.fvpme.mesh.builders import assemble_mesh
from src.fvpme.mesh.geometry import AdmissibleMesh
from src.fvpme.mesh.validation import validate_admissible

logger = get_logger(__name__)


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((number, line))
    return lines


def _floats(tokens: List[str], line_no: int) -> List[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise MeshFormatError(
            f"line {line_no}: expected numbers",
            details={"line": line_no, "tokens": tokens}
        ) from exc


def parse_mesh(text: str) -> AdmissibleMesh:
    """Parse mesh text; geometry is assembled but not validated."""
    lines = _content_lines(text)
    if not lines:
        raise MeshFormatError("empty mesh file", details={"line": 0})

    header_no, header = lines[0]
    parts = header.split()
    if len(parts) != 3:
        raise MeshFormatError(
            f"line {header_no}: header must be 'dim n_cells n_interfaces'",
            details={"line": header_no}
        )
    try:
        dim, n_cells, n_ifaces = (int(p) for p in parts)
    except ValueError as exc:
        raise MeshFormatError(
            f"line {header_no}: header values must be integers",
            details={"line": header_no}
        ) from exc
    if dim == 3:
        raise MeshFormatError(
            f"line {header_no}: dimension 3 is accepted by the grammar but not supported by this loader",
            details={"line": header_no, "dim": dim}
        )
    if dim not in (1, 2) or n_cells < 0 or n_ifaces < 0:
        raise MeshFormatError(
            f"line {header_no}: invalid header values",
            details={"line": header_no, "dim": dim}
        )
    if len(lines) - 1 != n_cells + n_ifaces:
        last = lines[-1][0]
        raise MeshFormatError(
            f"line {last}: expected {n_cells} cell and {n_ifaces} interface lines, "
            f"found {len(lines) - 1}",
            details={"line": last}
        )

    centers = np.zeros((n_cells, dim))
    measures = np.zeros(n_cells)
    vertices: List[np.ndarray] = [np.zeros((0, dim))] * n_cells
    seen = set()
    for line_no, line in lines[1:1 + n_cells]:
        if ":" not in line:
            raise MeshFormatError(
                f"line {line_no}: cell line needs a ': vertices' tail",
                details={"line": line_no}
            )
        head, tail = line.split(":", 1)
        head_tokens = head.split()
        if len(head_tokens) != dim + 2:
            raise MeshFormatError(
                f"line {line_no}: cell line needs 'id center({dim}) measure'",
                details={"line": line_no}
            )
        try:
            cell_id = int(head_tokens[0])
        except ValueError as exc:
            raise MeshFormatError(f"line {line_no}: bad cell id", details={"line": line_no}) from exc
        if not 0 <= cell_id < n_cells or cell_id in seen:
            raise MeshFormatError(
                f"line {line_no}: cell id out of range or repeated",
                details={"line": line_no, "cell": cell_id}
            )
        seen.add(cell_id)
        values = _floats(head_tokens[1:], line_no)
        coords = _floats(tail.split(), line_no)
        if len(coords) % dim or len(coords) < 2 * dim or (dim == 1 and len(coords) != 2):
            raise MeshFormatError(
                f"line {line_no}: vertex tail has the wrong number of coordinates",
                details={"line": line_no}
            )
        centers[cell_id] = values[:dim]
        measures[cell_id] = values[dim]
        vertices[cell_id] = np.asarray(coords).reshape(-1, dim)

    interfaces = []
    for line_no, line in lines[1 + n_cells:]:
        tokens = line.split()
        if len(tokens) != 3:
            raise MeshFormatError(
                f"line {line_no}: interface line needs 'idK idL measure'",
                details={"line": line_no}
            )
        try:
            k, l = int(tokens[0]), int(tokens[1])
        except ValueError as exc:
            raise MeshFormatError(f"line {line_no}: bad cell ids", details={"line": line_no}) from exc
        interfaces.append((k, l, _floats(tokens[2:], line_no)[0]))

    return assemble_mesh(dim, centers, measures, vertices, interfaces)


def load_mesh(mesh_file: Union[str, Path], orthogonality_tol: float = None) -> AdmissibleMesh:
    """
    Load and validate a mesh file.

    Args:
        mesh_file: path to a file in the documented grammar
        orthogonality_tol: relative tolerance for the orthogonality check

    Returns:
        Validated admissible mesh

    Raises:
        MeshFormatError: parse error (line number in details)
        InvalidGeometryError: empty or degenerate geometry
        OrthogonalityError: a center segment is not orthogonal to its interface
    """
    path = Path(mesh_file)
    mesh = parse_mesh(path.read_text())
    report = validate_admissible(mesh, orthogonality_tol=orthogonality_tol)

    for check in report.checks:
        if check.status == "fail":
            logger.warning(
                f"Mesh check failed: {check.name}",
                extra={"mesh_file": str(path), "residual": check.residual, "detail": check.detail}
            )

    ortho = report.check("orthogonality")
    if ortho is not None and ortho.status == "fail":
        raise OrthogonalityError(
            f"interface {ortho.detail} is not orthogonal to its center segment",
            details={"interface": ortho.detail, "residual": ortho.residual, "file": str(path)}
        )
    return mesh


def format_mesh(mesh: AdmissibleMesh) -> str:
    """Render a mesh in the documented grammar with full float precision."""
    digits = settings.output.significant_digits
    fmt = f".{digits}g"
    out = [
        "# fvpme mesh",
        f"{mesh.dim} {mesh.n_cells} {mesh.n_interfaces}",
    ]
    for cell in range(mesh.n_cells):
        center = " ".join(format(x, fmt) for x in mesh.centers[cell])
        verts = " ".join(format(x, fmt) for x in mesh.vertices[cell].ravel())
        out.append(f"{cell} {center} {format(mesh.measures[cell], fmt)} : {verts}")
    for (k, l), m_kl in zip(mesh.iface_cells, mesh.iface_measures):
        out.append(f"{k} {l} {format(m_kl, fmt)}")
    return "\n".join(out) + "\n"


def write_mesh(mesh: AdmissibleMesh, path: Union[str, Path]) -> Path:
    """Write a mesh file."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(format_mesh(mesh))
    return target
