"""
Convergence lab package.
"""

from src.fvpme.lab.references import (
    ReferenceSolution,
    barenblatt,
    barenblatt_constant,
    barenblatt_exponents,
    heat_sine,
    interior_samples,
    mesh_box,
    pde_residual,
)
from src.fvpme.lab.errors import ErrorMetrics, space_time_errors, trajectory_error
from src.fvpme.lab.refinement import (
    ConvergenceRow,
    ConvergenceTable,
    LevelResult,
    TemporalRow,
    build_table,
    observed_order,
    refinement_study,
    run_levels,
    temporal_order_study,
)
from src.fvpme.lab.compactness import (
    CompactnessReport,
    TranslateModulus,
    compactness_probe,
    compactness_study,
    dual_test_battery,
    translate_modulus,
)

__all__ = [
    "ReferenceSolution",
    "barenblatt",
    "barenblatt_constant",
    "barenblatt_exponents",
    "heat_sine",
    "interior_samples",
    "mesh_box",
    "pde_residual",
    "ErrorMetrics",
    "space_time_errors",
    "trajectory_error",
    "ConvergenceRow",
    "ConvergenceTable",
    "LevelResult",
    "TemporalRow",
    "build_table",
    "observed_order",
    "refinement_study",
    "run_levels",
    "temporal_order_study",
    "CompactnessReport",
    "TranslateModulus",
    "compactness_probe",
    "compactness_study",
    "dual_test_battery",
    "translate_modulus",
]
