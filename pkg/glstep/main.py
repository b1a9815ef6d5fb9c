"""
glstep - command-line entry point

    python -m glstep.main <subcommand> [flags]

Subcommands: degennes, fiber, gl1d, surface, strip, barrier, phase.
Defaults come from the run-config file (--config or GLSTEP_CONFIG), whose
[global] section applies to every subcommand and whose [<subcommand>]
section applies to one; command-line flags override both.

Exit codes: 0 on success, 2 on usage errors, 3 on solver failures.
"""
import argparse
import configparser
import os
import sys
from typing import Dict, List, Optional

from loguru import logger
from pydantic import ValidationError

from glstep import __version__
from glstep.commands import run_command
from glstep.config import settings
from glstep.exceptions import GLStepError, InputError
from glstep.schemas.run import COMMAND_CONFIGS
from glstep.utils.output import write_outputs

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3

# keys read by the entry point itself, never passed to a RunConfig
LOGGING_KEYS = ("log_level", "log_file")

COMMON_FLAGS = ["tol", "out", "format", "threads", "stdout", "timing", "spacing"]
COMMAND_FLAGS: Dict[str, List[str]] = {
    "degennes": ["grid"],
    "fiber": ["a", "grid"],
    "gl1d": ["a", "b"],
    "surface": ["grid"],
    "strip": ["a", "b", "R", "m", "hx", "hy", "dump"],
    "barrier": ["a", "b", "schedule", "hx", "hy"],
    "phase": ["a", "grid", "energies", "source", "geometry"],
}

FLAG_HELP = {
    "a": "Field ratio in [-1, 1) without 0 (a grid lo:hi:step or list for phase)",
    "b": "Scaled applied field b",
    "grid": "Sample grid lo:hi:step (inclusive) or comma list",
    "schedule": "Comma list of strip widths R",
    "tol": "Solver tolerance",
    "out": "Output path; the result record goes to <out>.summary.json",
    "format": "Primary table format: csv or json",
    "threads": "Worker processes for sweeps",
    "stdout": "Write the primary table to stdout",
    "timing": "Record wall time in provenance",
    "spacing": "1D grid spacing",
    "dump": "Binary dump path for the strip field",
    "source": "Barrier energy source in energy mode: gl1d or strip",
    "energies": "Energy mode instead of sign-only",
    "geometry": "Curve lengths |Gamma|,|dOmega1|,|dOmega2|",
    "R": "Strip width",
    "m": "Strip half-height (>= 4)",
    "hx": "Strip spacing across the barrier",
    "hy": "Strip spacing along x2",
}
SWITCHES = {"stdout", "timing", "energies"}

COMMAND_HELP = {
    "degennes": "de Gennes curve Theta(gamma) over a gamma grid",
    "fiber": "Band function mu_a(xi) and the barrier constant beta_a",
    "gl1d": "Effective 1D energy E1D_{a,b} at its optimal momentum",
    "surface": "Surface energy E_surf(b) over a b grid",
    "strip": "Strip minimizer at fixed width R and height m",
    "barrier": "Barrier energy e_a(b) from an R-schedule",
    "phase": "Phase map over an (a, b) grid",
}


def build_parser() -> argparse.ArgumentParser:
    """
    Parser whose option defaults are suppressed, so the namespace only
    carries flags that were actually given.
    """
    parser = argparse.ArgumentParser(
        prog="glstep", description="Ginzburg-Landau energies and phase maps under a magnetic step"
    )
    parser.add_argument("--version", action="version", version=f"glstep {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, flags in COMMAND_FLAGS.items():
        sub = commands.add_parser(name, help=COMMAND_HELP[name])
        sub.add_argument("--config", default=None, help="Run-config file (default: $GLSTEP_CONFIG)")
        sub.add_argument("--log-level", dest="log_level", default=None, help="Log level for stderr")
        for flag in flags + COMMON_FLAGS:
            if flag in SWITCHES:
                sub.add_argument(f"--{flag}", action="store_true", default=argparse.SUPPRESS, help=FLAG_HELP[flag])
            else:
                sub.add_argument(f"--{flag}", default=argparse.SUPPRESS, help=FLAG_HELP[flag])
    return parser


def read_config_file(path: Optional[str], command: str) -> Dict[str, str]:
    """[global] then [<command>] key/value pairs from a flat INI-style file."""
    if not path:
        return {}
    if not os.path.isfile(path):
        raise InputError(f"Config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read(path)
    except configparser.Error as e:
        raise InputError(f"Malformed config file {path}: {e}")
    values: Dict[str, str] = {}
    for section in ("global", command):
        if parser.has_section(section):
            values.update(parser.items(section))
    return values


def configure_logging(level: str, log_file: Optional[str] = None):
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="{time:HH:mm:ss} | {level: <8} | {name}:{function} - {message}")
    if log_file:
        logger.add(log_file, level=level.upper())


def _known_fields(command: str, values: Dict[str, str]) -> Dict[str, str]:
    """File values for fields of this command's config; other keys are ignored with a debug line."""
    fields = COMMAND_CONFIGS[command].model_fields
    kept = {key: value for key, value in values.items() if key in fields}
    for key in sorted(set(values) - set(kept) - set(LOGGING_KEYS)):
        logger.debug(f"Config key {key!r} does not apply to {command}")
    return kept


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    options = vars(args)
    command = options.pop("command")
    config_path = options.pop("config") or os.environ.get("GLSTEP_CONFIG")
    cli_level = options.pop("log_level")

    try:
        file_values = read_config_file(config_path, command)
    except InputError as e:
        configure_logging(cli_level or settings.log_level)
        logger.error(str(e))
        return EXIT_USAGE

    configure_logging(
        cli_level or file_values.get("log_level") or settings.log_level,
        file_values.get("log_file") or settings.log_file,
    )

    try:
        config = COMMAND_CONFIGS[command](**{**_known_fields(command, file_values), **options})
    except ValidationError as e:
        logger.error(f"Invalid {command} configuration:\n{e}")
        return EXIT_USAGE

    logger.info(f"glstep {__version__}: {command}")
    try:
        result = run_command(command, config)
        write_outputs(result.record, result.rows, result.columns, config.format, config.out, config.stdout)
    except InputError as e:
        logger.error(f"{command}: {e}")
        return EXIT_USAGE
    except GLStepError as e:
        logger.error(f"{command} failed: {e}")
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
