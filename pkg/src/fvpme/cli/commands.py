"""
Command implementations. Each command returns a process exit code; fvpme
exceptions are turned into a JSON diagnostic on stderr and their exit code.
"""

import functools
import sys
from pathlib import Path
from typing import Callable, Optional

from src.fvpme.cli.config_file import RunConfigFile, load_run_config
from src.fvpme.cli.presets import PresetLibrary, initial_data, reference_for
from src.fvpme.cli.selftest import run_selftest
from src.fvpme.cli.writers import write_convergence_csv, write_norm_table_csv, write_report_csv
from src.fvpme.config import settings
from src.fvpme.core.enums import CouplingRule, ErrorSampling
from src.fvpme.core.exceptions import ConfigError, EstimateViolationError, FVPMEException, ValidationError
from src.fvpme.core.logging import get_logger, get_run_id
from src.fvpme.core.schemas import ErrorResponse
from src.fvpme.discrete.io import format_float, write_cell_csv, write_space_time_csv
from src.fvpme.lab.refinement import MIN_LEVELS, build_table, run_levels
from src.fvpme.mesh.builders import build_uniform_grid
from src.fvpme.mesh.geometry import AdmissibleMesh
from src.fvpme.mesh.io import load_mesh, parse_mesh
from src.fvpme.mesh.validation import validate_admissible
from src.fvpme.solver.scheme import run
from src.fvpme.time_algebra.grid import TimeGrid

logger = get_logger(__name__)


def report_errors(command: Callable[..., int]) -> Callable[..., int]:
    """Map exceptions raised by a command to its exit code."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs) -> int:
        try:
            return command(*args, **kwargs)
        except FVPMEException as exc:
            response = ErrorResponse(error=exc.message, details=exc.details, run_id=get_run_id() or None)
            print(response.model_dump_json(), file=sys.stderr)
            return exc.exit_code
        except Exception as exc:
            logger.exception("Unhandled error", extra={"command": command.__name__})
            response = ErrorResponse(error="Internal error", details={"type": type(exc).__name__})
            print(response.model_dump_json(), file=sys.stderr)
            return 1

    return wrapper


def build_mesh(config: RunConfigFile) -> AdmissibleMesh:
    """
    Mesh of a run configuration: a mesh file or a uniform box.

    Raises:
        ConfigError: box bounds that do not come in pairs
    """
    section = config.mesh
    if section.file is not None:
        return load_mesh(config.resolve(section.file))
    if len(section.box) not in (2, 4):
        raise ConfigError("mesh box needs lo hi per axis for one or two axes", details={"key": "mesh.box"})
    box = [(section.box[i], section.box[i + 1]) for i in range(0, len(section.box), 2)]
    return build_uniform_grid(box, section.cells)


def _profile_params(config: RunConfigFile, library: PresetLibrary) -> dict:
    params = library.initial_profile(config.model.u0, config.model.preset)
    params.update(config.model.profile)
    return params


def _output_dir(config: RunConfigFile, out_dir: Optional[Path]) -> Path:
    if out_dir is not None:
        return Path(out_dir)
    if config.output.dir is not None:
        return config.resolve(config.output.dir)
    return settings.output.out_dir


@report_errors
def cmd_run(
    config_path: Path,
    out_dir: Optional[Path] = None,
    strict: Optional[bool] = None,
    library: Optional[PresetLibrary] = None
) -> int:
    """
    Run the scheme described by a configuration file.

    Writes <prefix>_trajectory.csv, <prefix>_report.csv and <prefix>_final.csv.
    """
    config = load_run_config(config_path)
    library = library if library is not None else PresetLibrary()
    mesh = build_mesh(config)
    u0 = initial_data(config.model.u0, _profile_params(config, library), mesh, config.model.q, config.resolve)
    grid = TimeGrid.uniform(config.time.T, config.time.n)

    field, report = run(mesh, grid, None, u0, config.solver)

    target = _output_dir(config, out_dir)
    prefix = config.output.prefix
    write_space_time_csv(target / f"{prefix}_trajectory.csv", field)
    write_report_csv(target / f"{prefix}_report.csv", report)
    write_cell_csv(target / f"{prefix}_final.csv", field.final)

    print(f"cells {mesh.n_cells} steps {grid.n} q {format_float(config.model.q)}")
    print(f"max mass drift {format_float(report.max_mass_drift)}")
    print(f"flux L1 {format_float(report.flux_l1)}")
    for violation in report.violations:
        print(f"violation: {violation}")

    strict = strict if strict is not None else settings.output.strict
    if strict and report.violations:
        raise EstimateViolationError(
            "a priori estimate violated",
            details={"violations": report.violations, "run_id": report.run_id}
        )
    return 0


@report_errors
def cmd_converge(
    config_path: Path,
    levels: Optional[int] = None,
    coupling: Optional[CouplingRule] = None,
    out_dir: Optional[Path] = None,
    strict: Optional[bool] = None,
    library: Optional[PresetLibrary] = None
) -> int:
    """
    Refinement study from the configuration's mesh, horizon and profile.

    The profile must have an exact reference (barenblatt or heat_sine).
    Writes <prefix>_convergence.csv.
    """
    config = load_run_config(config_path)
    library = library if library is not None else PresetLibrary()
    levels = levels if levels is not None else config.convergence.levels
    if levels is None:
        raise ConfigError("missing required key convergence.levels", details={"key": "convergence.levels"})
    if levels < MIN_LEVELS:
        raise ValidationError(f"--levels must be at least {MIN_LEVELS}", details={"levels": levels})
    coupling = CouplingRule(coupling or config.convergence.coupling or settings.lab.coupling)

    mesh = build_mesh(config)
    reference = reference_for(config.model.u0, _profile_params(config, library), mesh, config.model.q)
    if reference is None:
        raise ConfigError(
            "convergence studies need a profile with an exact reference",
            details={"key": "model.u0", "u0": config.model.u0}
        )

    results = run_levels(
        mesh, levels, coupling, reference, config.solver, config.time.T, config.time.n,
        sampling=ErrorSampling(config.convergence.sampling),
    )
    table = build_table(results, reference, coupling)
    write_convergence_csv(_output_dir(config, out_dir) / f"{config.output.prefix}_convergence.csv", table)

    print(f"reference {table.reference} coupling {table.coupling}")
    for row in table.rows:
        order = "" if row.order_l2 is None else format_float(row.order_l2)
        print(f"level {row.level} cells {row.cells} err_l2_qt {format_float(row.err_l2_qt)} order {order}")

    violations = {r.level: r.report.violations for r in results if r.report.violations}
    strict = strict if strict is not None else settings.output.strict
    if strict and violations:
        raise EstimateViolationError("a priori estimate violated", details={"levels": violations})
    return 0


@report_errors
def cmd_check_mesh(mesh_path: Path) -> int:
    """Print the admissibility report of a mesh file; 0 when every check passes, 2 otherwise."""
    try:
        text = Path(mesh_path).read_text()
    except OSError as exc:
        raise ValidationError("cannot read mesh file", details={"file": str(mesh_path)}) from exc
    mesh = parse_mesh(text)
    report = validate_admissible(mesh)
    print(f"dim {report.dim} cells {report.n_cells} interfaces {report.n_interfaces}")
    print(f"h {format_float(report.h)} rho {format_float(report.rho)}")
    for check in report.checks:
        detail = f" ({check.detail})" if check.detail else ""
        print(f"{check.status.upper():7s} {check.name} {format_float(check.residual)}{detail}")
    return 0 if report.passed else 2


@report_errors
def cmd_selftest(out_dir: Optional[Path] = None, library: Optional[PresetLibrary] = None) -> int:
    """Run the invariant battery; 1 when any check fails."""
    ledger = run_selftest(library)

    print("n rule norm1_Ainv pass")
    for row in ledger.norm_table:
        print(f"{row.n} {row.rule} {format_float(row.norm1_Ainv)} {str(row.passed).lower()}")
    for check in ledger.checks:
        detail = f" ({check.detail})" if check.detail else ""
        print(f"{check.status.upper():7s} {check.name} {format_float(check.residual)}{detail}")

    if out_dir is not None:
        write_norm_table_csv(Path(out_dir) / "bdf2_norm_table.csv", ledger.norm_table)

    failures = ledger.failures()
    if failures:
        print("failed: " + ", ".join(c.name for c in failures), file=sys.stderr)
        return 1
    return 0
