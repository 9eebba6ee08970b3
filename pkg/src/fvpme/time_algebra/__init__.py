"""
Multistep time-differentiation algebra package.
"""

from src.fvpme.time_algebra.grid import TimeGrid
from src.fvpme.time_algebra.banded import BandedLower, DenseLower, LowerTriangular, lower_triangular
from src.fvpme.time_algebra.operator import (
    MultistepOperator,
    bdf2_norm_closed_form,
    build_bdf2_uniform,
    build_custom,
    build_euler,
    check_At,
    derive_ahat,
    norm1_inverse,
    norm_table,
)
from src.fvpme.time_algebra.apply import (
    apply_delta,
    apply_one_step,
    duality_gap,
    space_time_pairing,
    transform_test_vector,
)
from src.fvpme.time_algebra.schemas import NormRow

__all__ = [
    "TimeGrid",
    "BandedLower",
    "DenseLower",
    "LowerTriangular",
    "lower_triangular",
    "MultistepOperator",
    "bdf2_norm_closed_form",
    "build_bdf2_uniform",
    "build_custom",
    "build_euler",
    "check_At",
    "derive_ahat",
    "norm1_inverse",
    "norm_table",
    "apply_delta",
    "apply_one_step",
    "duality_gap",
    "space_time_pairing",
    "transform_test_vector",
    "NormRow",
]
