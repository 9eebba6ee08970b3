"""
Command-line layer package.
"""

from src.fvpme.cli.config_file import RunConfigFile, load_run_config, parse_run_config
from src.fvpme.cli.presets import PresetLibrary, initial_data, reference_for
from src.fvpme.cli.writers import write_convergence_csv, write_norm_table_csv, write_report_csv
from src.fvpme.cli.selftest import SelftestLedger, run_selftest, two_cell_oracle
from src.fvpme.cli.commands import cmd_check_mesh, cmd_converge, cmd_run, cmd_selftest

__all__ = [
    "RunConfigFile",
    "load_run_config",
    "parse_run_config",
    "PresetLibrary",
    "initial_data",
    "reference_for",
    "write_convergence_csv",
    "write_norm_table_csv",
    "write_report_csv",
    "SelftestLedger",
    "run_selftest",
    "two_cell_oracle",
    "cmd_check_mesh",
    "cmd_converge",
    "cmd_run",
    "cmd_selftest",
]
