"""
Pydantic schemas for mesh validation.
"""

from typing import List, Optional

from pydantic import Field

from src.fvpme.core.schemas import BaseSchema, CheckResult


class ValidationReport(BaseSchema):
    """Admissibility checks of a mesh with its size and regularity."""

    dim: int
    n_cells: int
    n_interfaces: int
    h: float = Field(..., description="Largest cell diameter")
    rho: float = Field(..., description="Mesh regularity")
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Optional[CheckResult]:
        """Look up a check by name."""
        for c in self.checks:
            if c.name == name:
                return c
        return None

    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]
