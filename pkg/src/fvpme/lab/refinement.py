"""
Refinement studies against exact references.

Each level halves h (uniform refinement of a Cartesian base mesh); the
number of steps doubles (dt ~ h) or quadruples (dt ~ h^2). Levels are
independent runs and may execute on a thread pool; rows are merged in
level order.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from pydantic import Field, model_validator

from src.fvpme.config import settings
from src.fvpme.core.enums import CouplingRule, ErrorSampling
from src.fvpme.core.exceptions import SolverError, ValidationError
from src.fvpme.core.logging import get_logger, get_run_id
from src.fvpme.core.schemas import BaseSchema
from src.fvpme.discrete.fields import SpaceTimeField
from src.fvpme.lab.errors import ErrorMetrics, space_time_errors, trajectory_error
from src.fvpme.lab.references import ReferenceSolution, mesh_box
from src.fvpme.mesh.builders import refine_uniform
from src.fvpme.mesh.geometry import AdmissibleMesh
from src.fvpme.solver.schemas import RunReport, SolverConfig
from src.fvpme.solver.scheme import run
from src.fvpme.time_algebra.grid import TimeGrid

logger = get_logger(__name__)

MIN_LEVELS = 3


class ConvergenceRow(BaseSchema):
    """One refinement level."""

    level: int
    cells: int
    h: float
    dt: float
    n_steps: int
    err_l2_qt: float
    err_l1_qt: float
    err_linf_l2: float
    order_l2: Optional[float] = Field(None, description="log(e_prev / e) / log(h_prev / h)")
    runtime: float = 0.0


class ConvergenceTable(BaseSchema):
    """Rows ordered by level; h and dt strictly decrease."""

    reference: str
    coupling: CouplingRule
    rows: List[ConvergenceRow] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_refinement(self) -> "ConvergenceTable":
        """h and dt must strictly decrease across rows."""
        for prev, row in zip(self.rows, self.rows[1:]):
            if not (row.h < prev.h and row.dt < prev.dt):
                raise ValueError(f"level {row.level} does not refine level {prev.level}")
        return self

    def errors(self) -> np.ndarray:
        return np.array([row.err_l2_qt for row in self.rows])

    def reduction_factors(self) -> np.ndarray:
        """e_(l-1) / e_l."""
        errors = self.errors()
        return errors[:-1] / errors[1:]

    def is_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.errors()) < 0))


@dataclass(frozen=True, eq=False)
class LevelResult:
    """Trajectory and measurements of one level."""

    level: int
    mesh: AdmissibleMesh
    grid: TimeGrid
    field: SpaceTimeField
    report: RunReport
    errors: ErrorMetrics
    runtime: float


def observed_order(e_coarse: float, e_fine: float, ratio: float = 2.0) -> Optional[float]:
    """log(e_coarse / e_fine) / log(ratio); None when undefined."""
    if e_coarse <= 0 or e_fine <= 0:
        return None
    return math.log(e_coarse / e_fine) / math.log(ratio)


def steps_for_level(base_steps: int, level: int, coupling: CouplingRule) -> int:
    factor = 2 if CouplingRule(coupling) == CouplingRule.H else 4
    return base_steps * factor ** level


def level_meshes(base_mesh: AdmissibleMesh, levels: int) -> List[AdmissibleMesh]:
    meshes = [base_mesh]
    for _ in range(levels - 1):
        meshes.append(refine_uniform(meshes[-1]))
    return meshes


def _check_reference(reference: ReferenceSolution, config: SolverConfig) -> None:
    if reference.q != config.q:
        raise ValidationError(
            "reference exponent differs from the configured exponent",
            details={"reference_q": reference.q, "config_q": config.q}
        )


def run_levels(
    base_mesh: AdmissibleMesh,
    levels: int,
    coupling: CouplingRule,
    reference: ReferenceSolution,
    config: SolverConfig,
    T: float,
    base_steps: int,
    sampling: ErrorSampling = ErrorSampling.GAUSS,
    threads: Optional[int] = None
) -> List[LevelResult]:
    """
    Run the solver on every level.

    Raises:
        ValidationError: too few levels, mismatched exponent or a failed certificate
        SolverError: a level failed; ``details["level"]`` holds its index
    """
    if levels < MIN_LEVELS:
        raise ValidationError(f"a refinement study needs at least {MIN_LEVELS} levels", details={"levels": levels})
    if base_steps < 1 or not T > 0:
        raise ValidationError("base steps and horizon must be positive", details={"base_steps": base_steps, "T": T})
    _check_reference(reference, config)

    meshes = level_meshes(base_mesh, levels)
    box = mesh_box(base_mesh)
    if not reference.certificate(box, T):
        raise ValidationError("reference support leaves the domain within the horizon", details={"T": T})

    study_id = get_run_id() or "study"
    workers = threads if threads is not None else settings.lab.threads

    def solve_level(level: int) -> LevelResult:
        mesh = meshes[level]
        grid = TimeGrid.uniform(T, steps_for_level(base_steps, level, coupling))
        started = time.perf_counter()
        try:
            field, report = run(mesh, grid, None, reference.at(0.0), config, run_id=f"{study_id}-L{level}")
        except SolverError as exc:
            raise SolverError(
                f"level {level} failed: {exc.message}",
                details={"level": level, **exc.details}
            ) from exc
        runtime = time.perf_counter() - started
        errors = space_time_errors(field, reference, sampling)
        logger.info(
            "Level finished",
            extra={"level": level, "cells": mesh.n_cells, "steps": grid.n, "err_l2_qt": errors.l2_qt}
        )
        return LevelResult(level, mesh, grid, field, report, errors, runtime)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(solve_level, range(levels)))
    return [solve_level(level) for level in range(levels)]


def build_table(
    results: Sequence[LevelResult],
    reference: ReferenceSolution,
    coupling: CouplingRule
) -> ConvergenceTable:
    rows = []
    for i, result in enumerate(results):
        order = None
        if i > 0:
            prev = results[i - 1]
            order = observed_order(prev.errors.l2_qt, result.errors.l2_qt, prev.mesh.h / result.mesh.h)
        rows.append(ConvergenceRow(
            level=result.level,
            cells=result.mesh.n_cells,
            h=result.mesh.h,
            dt=result.grid.dt,
            n_steps=result.grid.n,
            err_l2_qt=result.errors.l2_qt,
            err_l1_qt=result.errors.l1_qt,
            err_linf_l2=result.errors.linf_l2,
            order_l2=order,
            runtime=result.runtime,
        ))
    return ConvergenceTable(reference=reference_label(reference), coupling=coupling, rows=rows)


def reference_label(reference: ReferenceSolution) -> str:
    kind = getattr(reference.kind, "value", reference.kind)
    if "t0" in reference.params:
        return f"{kind}(q={reference.q:g}, t0={reference.params['t0']:g})"
    return str(kind)


def refinement_study(
    base_mesh: AdmissibleMesh,
    levels: int,
    coupling: CouplingRule,
    reference: ReferenceSolution,
    config: SolverConfig,
    T: float,
    base_steps: int,
    sampling: ErrorSampling = ErrorSampling.GAUSS,
    threads: Optional[int] = None
) -> ConvergenceTable:
    """Errors per level with observed orders between consecutive levels."""
    results = run_levels(base_mesh, levels, coupling, reference, config, T, base_steps, sampling, threads)
    table = build_table(results, reference, coupling)
    if not table.is_decreasing():
        logger.warning("Errors do not decrease across levels", extra={"errors": table.errors().tolist()})
    return table


class TemporalRow(BaseSchema):
    """Error of one step count against the fine-step trajectory."""

    n_steps: int
    dt: float
    error: float
    order: Optional[float] = None


def temporal_order_study(
    mesh: AdmissibleMesh,
    T: float,
    step_counts: Sequence[int],
    initial,
    config: SolverConfig,
    reference_factor: int = 64
) -> List[TemporalRow]:
    """
    Observed temporal order on a fixed mesh.

    The reference trajectory uses ``reference_factor * step_counts[0]``
    steps, which every step count must divide. Errors are the
    L_inf(0,T;L2) distances at the shared times.
    """
    counts = sorted(int(n) for n in step_counts)
    reference_steps = reference_factor * counts[0]
    if any(reference_steps % n for n in counts):
        raise ValidationError(
            "every step count must divide the reference step count",
            details={"counts": counts, "reference_steps": reference_steps}
        )
    reference, _ = run(mesh, TimeGrid.uniform(T, reference_steps), None, initial, config)
    rows: List[TemporalRow] = []
    for n in counts:
        field, _ = run(mesh, TimeGrid.uniform(T, n), None, initial, config)
        error = trajectory_error(field, reference).linf_l2
        order = observed_order(rows[-1].error, error, n / rows[-1].n_steps) if rows else None
        rows.append(TemporalRow(n_steps=n, dt=T / n, error=error, order=order))
        logger.info("Temporal level finished", extra={"steps": n, "error": error})
    return rows
