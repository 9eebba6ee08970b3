"""
CSV persistence of cell vectors and space-time fields.

Schemas: ``cell_id,value`` and ``time_index,cell_id,value``; floats are
written with ``settings.output.significant_digits`` significant digits.
"""

import csv
from pathlib import Path
from typing import Union

import numpy as np

from src.fvpme.config import settings
from src.fvpme.core.exceptions import ValidationError
from src.fvpme.discrete.fields import CellVector, SpaceTimeField
from src.fvpme.mesh.geometry import AdmissibleMesh
from src.fvpme.time_algebra.grid import TimeGrid

PathLike = Union[str, Path]


def format_float(value: float) -> str:
    return format(float(value), f".{settings.output.significant_digits}g")


def write_cell_csv(path: PathLike, cell_vector: CellVector) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["cell_id", "value"])
        for cell, value in enumerate(cell_vector.values):
            writer.writerow([cell, format_float(value)])
    return target


def write_space_time_csv(path: PathLike, field: SpaceTimeField) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["time_index", "cell_id", "value"])
        for k, row in enumerate(field.values):
            for cell, value in enumerate(row):
                writer.writerow([k, cell, format_float(value)])
    return target


def _rows(path: PathLike, header: list) -> list:
    with open(path, newline="") as f:
        reader = csv.reader(f)
        found = next(reader, None)
        if found is None or [h.strip() for h in found] != header:
            raise ValidationError(
                f"CSV header must be {','.join(header)}",
                details={"file": str(path), "header": found}
            )
        return [(line_no, row) for line_no, row in enumerate(reader, start=2) if row]


def read_cell_csv(path: PathLike, mesh: AdmissibleMesh) -> CellVector:
    """Read a ``cell_id,value`` file; every cell must appear exactly once."""
    values = np.full(mesh.n_cells, np.nan)
    for line_no, row in _rows(path, ["cell_id", "value"]):
        try:
            cell, value = int(row[0]), float(row[1])
        except (ValueError, IndexError) as exc:
            raise ValidationError("malformed CSV row", details={"file": str(path), "line": line_no}) from exc
        if not 0 <= cell < mesh.n_cells or not np.isnan(values[cell]):
            raise ValidationError("cell id out of range or repeated", details={"line": line_no, "cell": cell})
        values[cell] = value
    if np.any(np.isnan(values)):
        raise ValidationError(
            "CSV does not cover every cell",
            details={"missing": int(np.argmax(np.isnan(values)))}
        )
    return CellVector(mesh, values)


def read_space_time_csv(path: PathLike, mesh: AdmissibleMesh, grid: TimeGrid) -> SpaceTimeField:
    """Read a ``time_index,cell_id,value`` file on a known mesh and grid."""
    values = np.full((grid.n + 1, mesh.n_cells), np.nan)
    for line_no, row in _rows(path, ["time_index", "cell_id", "value"]):
        try:
            k, cell, value = int(row[0]), int(row[1]), float(row[2])
        except (ValueError, IndexError) as exc:
            raise ValidationError("malformed CSV row", details={"file": str(path), "line": line_no}) from exc
        if not (0 <= k <= grid.n and 0 <= cell < mesh.n_cells):
            raise ValidationError("index out of range", details={"line": line_no})
        values[k, cell] = value
    if np.any(np.isnan(values)):
        raise ValidationError("CSV does not cover every time slot and cell")
    return SpaceTimeField(mesh, grid, values)
