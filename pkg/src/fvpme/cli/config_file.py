"""
Run configuration files.

Flat INI sections parsed with ``configparser`` and validated by pydantic:

    [mesh]        file = <path>  |  box = <a b [c d]> + cells = <n [m]>
    [time]        T, n
    [model]       q, u0 (box | barenblatt | constant | file | heat_sine),
                  preset (entry of initial_data.yaml), profile overrides
    [solver]      time_rule, newton_tol, newton_max_iter, damping,
                  linear_solver, fallback, monotone_max_sweeps
    [output]      dir, prefix
    [convergence] levels, coupling, sampling (optional)
"""

import configparser
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import Field, ValidationError as PydanticValidationError, field_validator

from src.fvpme.core.enums import CouplingRule, ErrorSampling, InitialPreset
from src.fvpme.core.exceptions import ConfigError
from src.fvpme.core.schemas import BaseSchema
from src.fvpme.solver.schemas import SolverConfig

REQUIRED_KEYS = {
    "time": ("T", "n"),
    "model": ("q", "u0"),
}

PROFILE_KEYS = ("t0", "mass", "center", "value", "lo", "hi", "height", "amplitude", "offset", "mode", "file")


def _floats(text: str) -> List[float]:
    return [float(token) for token in text.replace(",", " ").split()]


class MeshSection(BaseSchema):
    file: Optional[Path] = None
    box: Optional[List[float]] = None
    cells: Optional[List[int]] = None

    @field_validator("cells")
    @classmethod
    def validate_cells(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        """Cell counts must be positive."""
        if v is not None and any(c < 1 for c in v):
            raise ValueError("cell counts must be positive")
        return v


class TimeSection(BaseSchema):
    T: float = Field(..., gt=0)
    n: int = Field(..., ge=1)


class ModelSection(BaseSchema):
    q: float = Field(..., ge=1.0)
    u0: InitialPreset
    preset: Optional[str] = None
    profile: Dict[str, Any] = Field(default_factory=dict)


class OutputSection(BaseSchema):
    dir: Optional[Path] = None
    prefix: str = "run"


class ConvergenceSection(BaseSchema):
    levels: Optional[int] = None
    coupling: Optional[CouplingRule] = None
    sampling: ErrorSampling = ErrorSampling.GAUSS


class RunConfigFile(BaseSchema):
    """A validated run configuration."""

    source: Optional[Path] = None
    mesh: MeshSection
    time: TimeSection
    model: ModelSection
    solver: SolverConfig
    output: OutputSection = Field(default_factory=OutputSection)
    convergence: ConvergenceSection = Field(default_factory=ConvergenceSection)

    def resolve(self, path: Union[str, Path]) -> Path:
        """Paths in the file are relative to the file's directory."""
        candidate = Path(path)
        if candidate.is_absolute() or self.source is None:
            return candidate
        return self.source.parent / candidate


def _require(parser: configparser.ConfigParser, section: str, key: str) -> str:
    if not parser.has_section(section) or not parser.has_option(section, key):
        raise ConfigError(f"missing required key {section}.{key}", details={"key": f"{section}.{key}"})
    return parser.get(section, key)


def _section(parser: configparser.ConfigParser, section: str, exclude: tuple = ()) -> Dict[str, str]:
    if not parser.has_section(section):
        return {}
    return {key: value for key, value in parser.items(section) if key not in exclude}


def _profile(parser: configparser.ConfigParser) -> Dict[str, Any]:
    profile: Dict[str, Any] = {}
    for key in PROFILE_KEYS:
        if parser.has_option("model", key):
            raw = parser.get("model", key)
            if key == "file":
                profile[key] = raw
            else:
                values = _floats(raw)
                profile[key] = values[0] if len(values) == 1 else values
    return profile


def parse_run_config(text: str, source: Optional[Path] = None) -> RunConfigFile:
    """
    Parse the text of a run configuration.

    Raises:
        ConfigError: syntax error, missing key (named in details["key"]) or invalid value
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("run configuration is not valid INI", details={"error": str(exc)}) from exc

    for section, keys in REQUIRED_KEYS.items():
        for key in keys:
            _require(parser, section, key)
    if not parser.has_section("mesh"):
        raise ConfigError("missing required section mesh", details={"key": "mesh"})
    mesh = dict(parser.items("mesh"))
    if "file" not in mesh:
        for key in ("box", "cells"):
            _require(parser, "mesh", key)

    try:
        return RunConfigFile(
            source=source,
            mesh=MeshSection(
                file=mesh.get("file"),
                box=_floats(mesh["box"]) if "box" in mesh else None,
                cells=[int(c) for c in _floats(mesh["cells"])] if "cells" in mesh else None,
            ),
            time=TimeSection(T=parser.getfloat("time", "T"), n=parser.getint("time", "n")),
            model=ModelSection(
                q=parser.getfloat("model", "q"),
                u0=parser.get("model", "u0").strip(),
                preset=parser.get("model", "preset", fallback=None),
                profile=_profile(parser),
            ),
            solver=SolverConfig(
                q=parser.getfloat("model", "q"),
                **_section(parser, "solver", exclude=("q",))
            ),
            output=OutputSection(**_section(parser, "output")),
            convergence=ConvergenceSection(
                **_section(parser, "convergence")
            ),
        )
    except (PydanticValidationError, ValueError) as exc:
        raise ConfigError("invalid value in run configuration", details={"error": str(exc)}) from exc


def load_run_config(path: Union[str, Path]) -> RunConfigFile:
    """
    Read and parse a run configuration file.

    Raises:
        ConfigError: unreadable file or invalid content
    """
    source = Path(path)
    try:
        text = source.read_text()
    except OSError as exc:
        raise ConfigError("cannot read run configuration", details={"file": str(source)}) from exc
    return parse_run_config(text, source=source)
