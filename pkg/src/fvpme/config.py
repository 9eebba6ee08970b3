"""
Core configuration module using pydantic-settings for type-safe configuration.
Supports .env files and environment variables.
"""

from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.fvpme.core.enums import CouplingRule, LinearSolverKind


class SolverSettings(BaseSettings):
    """Nonlinear solver defaults."""

    newton_tol: float = Field(default=1e-11, alias="FVPME_NEWTON_TOL")
    newton_max_iter: int = Field(default=50, alias="FVPME_NEWTON_MAX_ITER")
    damping: bool = Field(default=True, alias="FVPME_NEWTON_DAMPING")
    linear_solver: LinearSolverKind = Field(
        default=LinearSolverKind.DIRECT,
        alias="FVPME_LINEAR_SOLVER"
    )
    fallback: bool = Field(default=True, alias="FVPME_FALLBACK")
    monotone_max_sweeps: int = Field(default=200_000, alias="FVPME_MONOTONE_MAX_SWEEPS")

    @field_validator("newton_tol")
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        """Tolerances must be positive."""
        if v <= 0:
            raise ValueError("newton_tol must be positive")
        return v


class MeshSettings(BaseSettings):
    """Admissibility checks and polygon quadrature."""

    orthogonality_tol: float = Field(default=1e-12, alias="FVPME_ORTHOGONALITY_TOL")
    measure_tol: float = Field(default=1e-12, alias="FVPME_MEASURE_TOL")
    polygon_refinement: int = Field(default=2, alias="FVPME_POLYGON_REFINEMENT")


class GraphSettings(BaseSettings):
    """Scalar resolvent solver settings."""

    scalar_tol: float = Field(default=1e-14, alias="FVPME_RESOLVENT_TOL")
    bracket_expansion: float = Field(default=2.0, alias="FVPME_BRACKET_EXPANSION")
    max_iter: int = Field(default=200, alias="FVPME_RESOLVENT_MAX_ITER")


class LabSettings(BaseSettings):
    """Convergence lab configuration."""

    threads: int = Field(default=1, alias="FVPME_THREADS")
    coupling: CouplingRule = Field(default=CouplingRule.H, alias="FVPME_COUPLING")

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v: int) -> int:
        """At least one worker."""
        return max(1, v)


class OutputSettings(BaseSettings):
    """Result persistence."""

    out_dir: Path = Field(default=Path("results"), alias="FVPME_OUT_DIR")
    significant_digits: int = Field(default=17, alias="FVPME_SIGNIFICANT_DIGITS")
    strict: bool = Field(default=False, alias="FVPME_STRICT")


class Settings(BaseSettings):
    """Main application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    app_name: str = "fvpme"
    app_version: str = "0.1.0"
    log_level: str = Field(default="WARNING", alias="LOG_LEVEL")
    log_json: bool = Field(default=True, alias="LOG_JSON")
    presets_dir: Path = Field(default=Path("config/presets"), alias="FVPME_PRESETS_DIR")

    # Component settings
    solver: SolverSettings = Field(default_factory=SolverSettings)
    mesh: MeshSettings = Field(default_factory=MeshSettings)
    graph: GraphSettings = Field(default_factory=GraphSettings)
    lab: LabSettings = Field(default_factory=LabSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate log level."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        v_upper = v.upper()
        if v_upper not in valid_levels:
            raise ValueError(f"Log level must be one of {valid_levels}")
        return v_upper


# Global settings instance
settings = Settings()
