"""
CSV writers for run reports, convergence tables and norm tables.
"""

import csv
from pathlib import Path
from typing import Iterable, List, Sequence, Union

from src.fvpme.discrete.io import format_float
from src.fvpme.lab.refinement import ConvergenceTable
from src.fvpme.solver.schemas import RunReport
from src.fvpme.time_algebra.schemas import NormRow

PathLike = Union[str, Path]

REPORT_COLUMNS = [
    "step", "time", "mass", "mass_drift", "energy", "energy_bound",
    "flux_l1", "newton_iterations", "fallback_used",
]
CONVERGENCE_COLUMNS = [
    "level", "cells", "h", "dt", "err_l2_qt", "err_l1_qt", "err_linf_l2", "order_l2", "runtime",
]
NORM_COLUMNS = ["n", "rule", "norm1_Ainv", "pass"]


def _write(path: PathLike, header: List[str], rows: Iterable[Sequence]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        writer.writerows(rows)
    return target


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_report_csv(path: PathLike, report: RunReport) -> Path:
    rows = (
        [_cell(getattr(record, column)) for column in REPORT_COLUMNS]
        for record in report.records
    )
    return _write(path, REPORT_COLUMNS, rows)


def write_convergence_csv(path: PathLike, table: ConvergenceTable) -> Path:
    rows = ([_cell(getattr(row, column)) for column in CONVERGENCE_COLUMNS] for row in table.rows)
    return _write(path, CONVERGENCE_COLUMNS, rows)


def write_norm_table_csv(path: PathLike, table: Sequence[NormRow]) -> Path:
    rows = ([row.n, row.rule, _cell(row.norm1_Ainv), _cell(row.passed)] for row in table)
    return _write(path, NORM_COLUMNS, rows)
