"""
Base Pydantic schemas with common fields.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from src.fvpme.core.enums import CheckStatus


class BaseSchema(BaseModel):
    """Base schema with common configuration."""

    model_config = ConfigDict(
        from_attributes=True,
        populate_by_name=True,
        use_enum_values=True,
    )


class CheckResult(BaseSchema):
    """Outcome of one named check with its worst-case residual."""

    name: str = Field(..., description="Check identifier")
    status: CheckStatus = Field(..., description="pass, fail or skipped")
    residual: float = Field(default=0.0, description="Worst-case residual observed")
    detail: Optional[str] = Field(None, description="Offending entity or explanation")

    @property
    def passed(self) -> bool:
        return self.status != CheckStatus.FAIL.value


class ErrorResponse(BaseSchema):
    """Diagnostic printed by the command line on failure."""

    error: str = Field(..., description="Error message")
    details: Optional[dict] = Field(None, description="Additional error details")
    run_id: Optional[str] = Field(None, description="Run ID active when the error occurred")
