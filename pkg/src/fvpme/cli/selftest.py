"""
Invariant battery behind ``fvpme selftest``.

Each check returns a CheckResult carrying its worst residual; thresholds
and sample sizes come from selftest.yaml.
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from src.fvpme.cli.presets import PresetLibrary, initial_data
from src.fvpme.core.enums import CheckStatus, InitialPreset, TimeRule
from src.fvpme.core.logging import get_logger
from src.fvpme.core.schemas import BaseSchema, CheckResult
from src.fvpme.discrete.fields import CellVector, SpaceTimeField
from src.fvpme.discrete.probes import summation_by_parts_residual
from src.fvpme.graphs.inequalities import bdf2_multiplier_gap, cs_gap
from src.fvpme.graphs.piecewise import stefan_graph
from src.fvpme.graphs.power_law import PowerLaw, psi
from src.fvpme.mesh.builders import build_uniform_grid
from src.fvpme.solver.assembly import BDF2_COEFFICIENT, EULER_COEFFICIENT, history_term
from src.fvpme.solver.schemas import SolverConfig
from src.fvpme.solver.scheme import run, step_bdf2, step_euler
from src.fvpme.time_algebra.apply import apply_one_step, duality_gap, space_time_pairing
from src.fvpme.time_algebra.grid import TimeGrid
from src.fvpme.time_algebra.operator import (
    bdf2_norm_closed_form,
    build_bdf2_uniform,
    build_custom,
    build_euler,
    norm_table,
)
from src.fvpme.time_algebra.schemas import NormRow

logger = get_logger(__name__)

# Scalar inequality samples are drawn from [-CS_RANGE, CS_RANGE]
CS_RANGE = 10.0


class SelftestLedger(BaseSchema):
    """Outcome of the battery."""

    checks: List[CheckResult]
    norm_table: List[NormRow]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]


def _result(name: str, residual: float, tol: float, detail: Optional[str] = None) -> CheckResult:
    status = CheckStatus.PASS if residual <= tol else CheckStatus.FAIL
    return CheckResult(name=name, status=status, residual=float(residual), detail=detail)


def two_cell_oracle(
    q: float,
    measures: Sequence[float],
    tau: float,
    dt: float,
    coefficient: float,
    history: Sequence[float]
) -> np.ndarray:
    """
    Step solution on two cells by elimination and bracketing.

    The step conserves c(m_0 a + m_1 b) = m_0 h_0 + m_1 h_1; substituting b
    leaves one increasing scalar equation in a.
    """
    m0, m1 = (float(m) for m in measures)
    h0, h1 = (float(h) for h in history)
    total = m0 * h0 + m1 * h1

    def other(a: float) -> float:
        return (total - coefficient * m0 * a) / (coefficient * m1)

    def residual(a: float) -> float:
        return (coefficient * a - h0) * m0 / dt + tau * float(psi(a, q) - psi(other(a), q))

    start = h0 / coefficient
    width = 1.0 + abs(start) + abs(total)
    while residual(start - width) > 0 or residual(start + width) < 0:
        width *= 2.0
    a = optimize.brentq(residual, start - width, start + width, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return np.array([a, other(a)])


def check_norm_table(ns: Sequence[int]) -> Tuple[CheckResult, List[NormRow]]:
    table = norm_table(ns, TimeRule.BDF2)
    worst = max(abs(row.norm1_Ainv - bdf2_norm_closed_form(row.n)) for row in table)
    detail = None if all(row.passed for row in table) else "stability threshold exceeded"
    result = _result("bdf2_norm_table", worst, 1e-12, detail)
    if detail:
        result = result.model_copy(update={"status": CheckStatus.FAIL.value})
    return result, table


def check_cs_gap(rng: np.random.Generator, samples: int, exponents: Sequence[float]) -> List[CheckResult]:
    results = []
    for q in exponents:
        a = rng.uniform(-CS_RANGE, CS_RANGE, samples)
        b = rng.uniform(-CS_RANGE, CS_RANGE, samples)
        gap = cs_gap(a, b, q)
        # Magnitude of the computed products, not of their difference
        scale = np.abs(a - b) * (np.abs(psi(a, q)) + np.abs(psi(b, q))) + 1e-300
        worst = float(max(0.0, -(gap / scale).min()))
        results.append(_result(f"cs_gap_q{q:g}", worst, 1e-13, f"min gap {gap.min():.3e}"))
    return results


def check_bdf2_multiplier(rng: np.random.Generator, samples: int) -> CheckResult:
    a, b, c = (rng.uniform(-3.0, 3.0, samples) for _ in range(3))
    gap = bdf2_multiplier_gap(a, b, c)
    expected = 0.25 * (a - 2.0 * b + c) ** 2
    scale = 1.0 + a ** 2 + b ** 2 + c ** 2
    return _result("bdf2_multiplier_gap", float(np.max(np.abs(gap - expected) / scale)), 1e-13)


def check_resolvent(rng: np.random.Generator, samples: int, piecewise_samples: int) -> List[CheckResult]:
    results = []
    for q in (2.0, 3.0):
        graph = PowerLaw(q)
        lam = rng.uniform(0.1, 10.0, samples)
        y1 = rng.uniform(-5.0, 5.0, samples)
        y2 = rng.uniform(-5.0, 5.0, samples)
        gap = np.abs(graph.resolvent_many(lam, y1) - graph.resolvent_many(lam, y2)) - np.abs(y1 - y2)
        results.append(_result(f"resolvent_nonexpansive_q{q:g}", float(max(0.0, gap.max())), 1e-12))

    graph = stefan_graph(1.0)
    lam = rng.uniform(0.1, 10.0, piecewise_samples)
    y1 = rng.uniform(-5.0, 5.0, piecewise_samples)
    y2 = rng.uniform(-5.0, 5.0, piecewise_samples)
    gap = np.abs(graph.resolvent_many(lam, y1) - graph.resolvent_many(lam, y2)) - np.abs(y1 - y2)
    results.append(_result("resolvent_nonexpansive_stefan", float(max(0.0, gap.max())), 1e-12))
    return results


def check_two_cell_oracle(rng: np.random.Generator, draws: int) -> List[CheckResult]:
    mesh = build_uniform_grid((0.0, 1.0), 2)
    tau = float(mesh.transmissibilities[0])
    results = []
    for q in (2.0, 3.0):
        config = SolverConfig(q=q)
        worst_euler = worst_bdf2 = 0.0
        for _ in range(draws):
            dt = float(rng.uniform(0.01, 1.0))
            u_km2 = CellVector(mesh, rng.uniform(-1.0, 2.0, 2))
            u_km1 = CellVector(mesh, rng.uniform(-1.0, 2.0, 2))

            euler = step_euler(u_km1, dt, config).values
            oracle = two_cell_oracle(q, mesh.measures, tau, dt, EULER_COEFFICIENT,
                                     history_term(TimeRule.EULER, u_km1.values))
            worst_euler = max(worst_euler, float(np.abs(euler - oracle).max()))

            bdf2 = step_bdf2(u_km1, u_km2, dt, config).values
            oracle = two_cell_oracle(q, mesh.measures, tau, dt, BDF2_COEFFICIENT,
                                     history_term(TimeRule.BDF2, u_km1.values, u_km2.values))
            worst_bdf2 = max(worst_bdf2, float(np.abs(bdf2 - oracle).max()))
        results.append(_result(f"two_cell_euler_q{q:g}", worst_euler, 1e-10))
        results.append(_result(f"two_cell_bdf2_q{q:g}", worst_bdf2, 1e-10))
    return results


def check_structure(rng: np.random.Generator, n: int) -> List[CheckResult]:
    uniform = TimeGrid.uniform(1.0, n)
    nonuniform = TimeGrid.from_times(np.concatenate([[0.0], np.cumsum(rng.uniform(0.5, 1.5, n))]))
    operators = {
        "bdf2": build_bdf2_uniform(uniform),
        "euler": build_euler(nonuniform),
        "custom": build_custom(nonuniform, [1.0, -4.0, 3.0]),
    }
    results = []
    measures = rng.uniform(0.5, 1.5, 4)
    for name, op in operators.items():
        worst = max(op.structural_residuals().values())
        results.append(_result(f"structure_{name}", worst, 1e-13))

        u = rng.normal(size=(n + 1, measures.size))
        phi = rng.normal(size=(n + 1, measures.size))
        phi[-1] = 0.0
        scale = abs(space_time_pairing(op.grid, measures, apply_one_step(op.grid, u), phi[1:])) + 1.0
        results.append(_result(f"duality_{name}", abs(duality_gap(op, measures, u, phi)) / scale, 1e-10))
    return results


def check_summation_by_parts(rng: np.random.Generator, n: int) -> CheckResult:
    mesh = build_uniform_grid((0.0, 1.0), 16)
    grid = TimeGrid.uniform(1.0, n)
    field = SpaceTimeField(mesh, grid, rng.normal(size=(n + 1, mesh.n_cells)))
    residual, scale = summation_by_parts_residual(
        field,
        lambda x: np.cos(np.pi * np.atleast_2d(x)[:, 0]),
        lambda t: np.sin(np.pi * np.asarray(t)) ** 2,
    )
    return _result("summation_by_parts", abs(residual) / max(scale, 1.0), 1e-10)


def check_run_estimates(q: float, cells: int, steps: int) -> CheckResult:
    mesh = build_uniform_grid((0.0, 1.0), cells)
    u0 = initial_data(InitialPreset.BOX, {}, mesh, q)
    _, report = run(mesh, TimeGrid.uniform(0.1, steps), None, u0, SolverConfig(q=q), run_id="selftest")
    detail = "; ".join(report.violations + report.failures) or None
    return _result("run_estimates", float(len(report.violations) + len(report.failures)), 0.0, detail)


def run_selftest(library: Optional[PresetLibrary] = None) -> SelftestLedger:
    """Run every check of the battery."""
    library = library if library is not None else PresetLibrary()
    rng = np.random.default_rng(int(library.threshold("seed", 20240617)))
    samples = int(library.threshold("scalar_samples", 100_000))

    checks: List[CheckResult] = []
    norm_result, table = check_norm_table(library.threshold("norm_ns", [1, 5, 10, 50]))
    checks.append(norm_result)

    battery: List[Callable[[], object]] = [
        lambda: check_cs_gap(rng, samples, library.threshold("cs_exponents", [1.5, 2.0, 3.0])),
        lambda: check_bdf2_multiplier(rng, samples),
        lambda: check_resolvent(
            rng,
            int(library.threshold("resolvent_samples", 10_000)),
            int(library.threshold("piecewise_resolvent_samples", 500)),
        ),
        lambda: check_two_cell_oracle(rng, int(library.threshold("oracle_draws", 20))),
        lambda: check_structure(rng, int(library.threshold("structure_steps", 12))),
        lambda: check_summation_by_parts(rng, int(library.threshold("structure_steps", 12))),
        lambda: check_run_estimates(
            float(library.threshold("run_q", 2.0)),
            int(library.threshold("run_cells", 64)),
            int(library.threshold("run_steps", 16)),
        ),
    ]
    for check in battery:
        outcome = check()
        checks.extend(outcome if isinstance(outcome, list) else [outcome])

    ledger = SelftestLedger(checks=checks, norm_table=table)
    for failure in ledger.failures():
        logger.warning("Selftest check failed", extra={"check": failure.name, "residual": failure.residual})
    return ledger
