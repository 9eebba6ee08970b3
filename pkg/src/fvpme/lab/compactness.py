"""
Compactness diagnostics of discrete trajectories.

For every trajectory the probe reports the dual time-derivative ratio
sup_phi |int int deltahat(u) pi P phi| / ||grad P phi||_inf over a fixed
battery of test functions, the flux L1 norm that bounds it, space-translate
moduli and the weak-formulation residuals on the same battery.
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import Field

from src.fvpme.core.enums import TimeRule
from src.fvpme.core.logging import get_logger
from src.fvpme.core.schemas import BaseSchema
from src.fvpme.discrete.fields import SpaceTimeField
from src.fvpme.discrete.operators import gradient_sup_norm, project_test_function
from src.fvpme.discrete.probes import translate_difference_l2
from src.fvpme.graphs.power_law import PowerLaw
from src.fvpme.lab.references import mesh_box
from src.fvpme.solver.estimates import flux_l1_norm, time_derivative_bound, weak_form_residual

logger = get_logger(__name__)

TestFunction = Callable[[np.ndarray, float], np.ndarray]

_SPACE_FACTORS: List[Callable[[np.ndarray], np.ndarray]] = [
    lambda s: np.ones_like(s),
    lambda s: s,
    lambda s: s * s * (3.0 - 2.0 * s),
    lambda s: 4.0 * s * (1.0 - s),
]

_TIME_FACTORS: List[Callable[[np.ndarray], np.ndarray]] = [
    lambda r: 1.0 - r,
    lambda r: (1.0 - r) ** 2,
    lambda r: np.cos(0.5 * np.pi * r),
]


def dual_test_battery(
    domain_box: Tuple[np.ndarray, np.ndarray],
    T: float
) -> List[TestFunction]:
    """
    Twelve test functions X(x) theta(t): X a product over axes of a cubic in
    the rescaled coordinate, theta vanishing at t = T.
    """
    lo, hi = (np.asarray(b, dtype=float) for b in domain_box)
    extent = hi - lo

    def make(space, time_factor) -> TestFunction:
        def function(points: np.ndarray, t: float) -> np.ndarray:
            s = (np.atleast_2d(points) - lo) / extent
            return np.prod(space(s), axis=1) * time_factor(t / T)
        return function

    return [make(space, theta) for space in _SPACE_FACTORS for theta in _TIME_FACTORS]


class TranslateModulus(BaseSchema):
    """(int_0^T ||pi u(. + shift) - pi u||^2 dt)^(1/2) for a shift along the first axis."""

    shift: float
    value: float


class CompactnessReport(BaseSchema):
    """Compactness quantities of one trajectory."""

    cells: int
    h: float
    n_steps: int
    dual_ratio: float = Field(..., description="sup |int int deltahat(u) P phi| / ||grad P phi||_inf")
    dual_bound: float = Field(..., description="(1/d) ||grad psi(u)||_L1")
    flux_l1: float
    translate_moduli: List[TranslateModulus] = Field(default_factory=list)
    weak_form_max_ratio: float = Field(0.0, description="max |A + B + C| / scale over the battery")
    test_vector_gradient: float = Field(0.0, description="max ||grad(phihat - P phi)||_inf")

    @property
    def dual_estimate_holds(self) -> bool:
        return self.dual_ratio <= self.dual_bound * (1.0 + 1e-9) + 1e-14


def translate_modulus(field: SpaceTimeField, shift: float) -> float:
    zeta = np.zeros(field.mesh.dim)
    zeta[0] = shift
    squares = np.array([translate_difference_l2(field.at(k), zeta) ** 2 for k in range(1, field.n + 1)])
    return float(np.sqrt(field.grid.steps @ squares))


def compactness_probe(
    field: SpaceTimeField,
    graph: PowerLaw,
    rule: TimeRule = TimeRule.BDF2,
    shifts: Optional[Sequence[float]] = None,
    battery: Optional[Sequence[TestFunction]] = None
) -> CompactnessReport:
    """
    Compactness quantities of a completed run.

    ``shifts`` defaults to the ladder (h, 2h, 4h) of the field's mesh.
    """
    mesh, grid = field.mesh, field.grid
    functions = battery if battery is not None else dual_test_battery(mesh_box(mesh), grid.T)
    ladder = shifts if shifts is not None else [mesh.h, 2.0 * mesh.h, 4.0 * mesh.h]

    dual_ratio = 0.0
    weak_ratio = 0.0
    corrector = 0.0
    for function in functions:
        projected = project_test_function(mesh, grid, function)
        grad_sup = max((gradient_sup_norm(mesh, projected[k]) for k in range(1, grid.n + 1)), default=0.0)
        if grad_sup > 0:
            lhs, _ = time_derivative_bound(field, function, graph, rule)
            dual_ratio = max(dual_ratio, lhs / grad_sup)

        residual = weak_form_residual(field, function, graph, rule)
        if residual.scale > 0:
            weak_ratio = max(weak_ratio, abs(residual.total) / residual.scale)
        corrector = max(corrector, residual.test_vector_gradient)

    flux = flux_l1_norm(field, graph)
    report = CompactnessReport(
        cells=mesh.n_cells,
        h=mesh.h,
        n_steps=grid.n,
        dual_ratio=dual_ratio,
        dual_bound=flux / mesh.dim,
        flux_l1=flux,
        translate_moduli=[TranslateModulus(shift=float(s), value=translate_modulus(field, s)) for s in ladder],
        weak_form_max_ratio=weak_ratio,
        test_vector_gradient=corrector,
    )
    if not report.dual_estimate_holds:
        logger.warning(
            "Dual time-derivative estimate exceeded",
            extra={"ratio": report.dual_ratio, "bound": report.dual_bound}
        )
    return report


def compactness_study(
    fields: Sequence[SpaceTimeField],
    graph: PowerLaw,
    rule: TimeRule = TimeRule.BDF2
) -> List[CompactnessReport]:
    """One probe per refinement level, translates at each level's own h."""
    return [compactness_probe(field, graph, rule) for field in fields]
