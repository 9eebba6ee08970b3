"""
Pydantic schemas for time-algebra reports.
"""

from pydantic import Field

from src.fvpme.core.enums import TimeRule
from src.fvpme.core.schemas import BaseSchema


class NormRow(BaseSchema):
    """One row of a stability table."""

    n: int = Field(..., ge=1)
    rule: TimeRule
    norm1_Ainv: float
    passed: bool = Field(..., alias="pass")
