"""
Command-line entry point.

    fvpme [--strict] [--out DIR] run <config>
    fvpme [--strict] [--out DIR] converge <config> --levels K [--coupling {h,h2}]
    fvpme check-mesh <mesh file>
    fvpme [--out DIR] selftest
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from src.fvpme.cli.commands import cmd_check_mesh, cmd_converge, cmd_run, cmd_selftest
from src.fvpme.config import settings
from src.fvpme.core.enums import CouplingRule
from src.fvpme.core.logging import setup_logging


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.app_name,
        description="Two-point finite volumes with BDF2 time stepping for the porous medium equation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.app_version}")
    parser.add_argument(
        "--strict",
        action="store_true",
        default=None,
        help="treat a priori estimate violations as fatal (exit 4)",
    )
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--log-level", default=settings.log_level, help="logging level")

    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run the scheme from a configuration file")
    run.add_argument("config", type=Path)

    converge = commands.add_parser("converge", help="refinement study against an exact reference")
    converge.add_argument("config", type=Path)
    converge.add_argument("--levels", type=int, default=None, help="number of refinement levels (>= 3)")
    converge.add_argument(
        "--coupling",
        choices=[c.value for c in CouplingRule],
        default=None,
        help="dt proportional to h or to h^2",
    )

    check_mesh = commands.add_parser("check-mesh", help="validate a mesh file")
    check_mesh.add_argument("mesh", type=Path)

    commands.add_parser("selftest", help="run the invariant battery")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level.upper(), use_json=settings.log_json)

    if args.command == "run":
        return cmd_run(args.config, out_dir=args.out, strict=args.strict)
    if args.command == "converge":
        return cmd_converge(args.config, levels=args.levels, coupling=args.coupling, out_dir=args.out, strict=args.strict)
    if args.command == "check-mesh":
        return cmd_check_mesh(args.mesh)
    return cmd_selftest(out_dir=args.out)


if __name__ == "__main__":
    sys.exit(main())
