"""
Command-line front end.

    python cli.py figure1 --out out/fig1 --format both
    python cli.py phase-dist --k 0.5 --tau 0.7 --alpha 2
    python cli.py sweep --sweep k=1:10:10 --sweep tau=0.001:0.05:50 --observables dtheta,sigma
    python cli.py oracle-check --preset small-alpha
    python cli.py history list --history-db runs.db

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O error,
4 failed oracle check.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from errors import ConfigError, NumericalError
from figures import build_table
from oracle_checks import checks_frame, run_oracle_check
from phase import CoeffStrategy
from reporting import OutputFormat, log_memory_usage, write_csv, write_outputs
from run_config import Command, RunConfig, build_run_config, default_log_level
from run_history import get_history_manager
from sweeps import run_sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3
EXIT_ORACLE_FAILED = 4

HISTORY_ACTIONS = ("list", "export", "stats")
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# flags whose values go into RunConfig; everything else steers the CLI itself
CONFIG_FLAGS = (
    "k", "tau", "alpha", "phi_alpha", "beta_re", "beta_im", "phi", "grid", "ncut_field", "ncut_mirror",
    "out", "format", "strategy", "points", "range", "preset", "sweep", "observables", "force", "time",
    "mass", "cavity_length", "omega_c", "omega_m", "omega_0", "workers",
)


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that raises ConfigError instead of exiting on bad input."""

    def error(self, message: str):
        raise ConfigError(message)


def build_parser() -> CliParser:
    parser = CliParser(prog="cavphase", description="Phase and quadrature of a cavity field coupled to a moving mirror")
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("action", nargs="?", choices=HISTORY_ACTIONS, help="history only: list, export or stats")

    point = parser.add_argument_group("parameters")
    point.add_argument("--k", type=float, help="scaled coupling g/omega_m")
    point.add_argument("--tau", type=float, help="scaled time omega_m t")
    point.add_argument("--alpha", type=float, help="field amplitude |alpha|")
    point.add_argument("--phi-alpha", type=float, help="field phase arg(alpha)")
    point.add_argument("--beta-re", type=float, help="mirror amplitude, real part")
    point.add_argument("--beta-im", type=float, help="mirror amplitude, imaginary part")
    point.add_argument("--phi", type=float, help="local-oscillator phase")
    point.add_argument("--grid", type=int, help="phase grid size")
    point.add_argument("--ncut-field", type=int, help="field Fock cutoff")
    point.add_argument("--ncut-mirror", type=int, help="mirror Fock cutoff")
    point.add_argument("--strategy", choices=[s.value for s in CoeffStrategy], help="heterodyne coefficient route")

    scan = parser.add_argument_group("scans")
    scan.add_argument("--points", type=int, help="abscissa point count")
    scan.add_argument("--range", help="abscissa START:STOP")
    scan.add_argument("--sweep", action="append", help="AXIS=START:STOP:COUNT, AXIS in k, tau, alpha, phi (repeatable)")
    scan.add_argument("--observables", help="comma list of dtheta, theta_mean, sigma, theta_tilde, dx, snr, f_min")
    scan.add_argument("--workers", type=int, help="process pool size")

    physical = parser.add_argument_group("physical parameters (SI)")
    physical.add_argument("--preset", help="oracle-check preset, or 'ligo'")
    physical.add_argument("--force", type=float, help="constant mirror force in N")
    physical.add_argument("--time", type=float, help="measurement time in s")
    physical.add_argument("--mass", type=float)
    physical.add_argument("--cavity-length", type=float)
    physical.add_argument("--omega-c", type=float)
    physical.add_argument("--omega-m", type=float)
    physical.add_argument("--omega-0", type=float)

    output = parser.add_argument_group("output")
    output.add_argument("--out", help="output file stem")
    output.add_argument("--format", choices=[f.value for f in OutputFormat])
    output.add_argument("--config", help="file of key=value lines, merged under explicit flags")
    output.add_argument("--history-db", help="sqlite run ledger (default $CAVPHASE_HISTORY_DB)")
    output.add_argument("--limit", type=int, default=20, help="history list: number of rows")
    output.add_argument("--command", dest="command_filter", help="history list: only this command")
    verbosity = output.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="warnings and errors only")
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False):
    if verbose:
        level = "DEBUG"
    elif quiet:
        level = "WARNING"
    else:
        level = default_log_level()
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    try:
        root.setLevel(level)
    except ValueError as e:
        root.setLevel(logging.INFO)
        raise ConfigError(f"CAVPHASE_LOG_LEVEL: {e}") from e


def _config_flags(args: argparse.Namespace) -> Dict[str, Any]:
    return {name: getattr(args, name) for name in CONFIG_FLAGS}


def _run_history(args: argparse.Namespace, config: RunConfig) -> Tuple[int, List[str]]:
    manager = get_history_manager(args.history_db)
    if manager is None:
        raise ConfigError("history needs --history-db or CAVPHASE_HISTORY_DB")
    action = args.action or "list"
    if action == "stats":
        for key, value in manager.get_statistics().items():
            print(f"{key}: {value}")
        return EXIT_OK, []
    if action == "export":
        filename = manager.export_to_csv(f"{config.out}.csv", command_filter=args.command_filter)
        if filename is None:
            logger.warning("No runs to export")
            return EXIT_OK, []
        return EXIT_OK, [filename]
    for record in manager.get_run_history(limit=args.limit, command_filter=args.command_filter):
        print(f"{record['record_id']}\t{record['timestamp']}\t{record['command']}\texit={record['exit_code']}\t"
              f"{record['duration_s'] or 0.0:.2f}s\t{';'.join(record['outputs'])}")
    return EXIT_OK, []


def run_command(config: RunConfig) -> Tuple[int, List[str], str]:
    """Compute and write one command. Returns (exit code, written paths, diagnostics)."""
    if config.command is Command.ORACLE_CHECK:
        if config.format is not OutputFormat.CSV:
            logger.warning("oracle-check writes CSV only")
        results = run_oracle_check(config.preset)
        path = write_csv(checks_frame(results), Path(f"{config.out}.csv"))
        failed = [r.name for r in results if not r.passed]
        diagnostics = f"failed={','.join(failed)}" if failed else ""
        return (EXIT_ORACLE_FAILED if failed else EXIT_OK), [str(path)], diagnostics

    result = run_sweep(config) if config.command is Command.SWEEP else build_table(config)
    written = write_outputs(result, config.out, config.format)
    diagnostics = f"clamped={result.clamped};warnings={result.warnings}"
    if result.warnings:
        logger.warning("%d rows carry diagnostics flags", result.warnings)
    return EXIT_OK, written, diagnostics


def main(argv: Optional[List[str]] = None) -> int:
    started = time.perf_counter()
    args = None
    config: Optional[RunConfig] = None
    exit_code, outputs, diagnostics = EXIT_OK, [], ""
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.verbose, args.quiet)
        if args.action is not None and args.command != Command.HISTORY.value:
            raise ConfigError(f"{args.command} takes no positional action")
        config = build_run_config(args.command, _config_flags(args), args.config)
        if config.command is Command.HISTORY:
            exit_code, outputs = _run_history(args, config)
            return exit_code
        log_memory_usage(f"before {config.command.value}")
        exit_code, outputs, diagnostics = run_command(config)
        log_memory_usage(f"after {config.command.value}")
    except ValueError as e:
        logger.error("Invalid input: %s", e)
        exit_code, diagnostics = EXIT_INVALID, str(e)
    except ArithmeticError as e:
        logger.error("Numerical failure: %s", e)
        if isinstance(e, NumericalError):
            logger.debug("Diagnostics: %s", e.diagnostics)
        exit_code, diagnostics = EXIT_NUMERICAL, str(e)
    except OSError as e:
        logger.error("I/O error: %s", e)
        exit_code, diagnostics = EXIT_IO, str(e)

    if args is not None and args.command != Command.HISTORY.value:
        _record_run(args, config, outputs, exit_code, time.perf_counter() - started, diagnostics)
    return exit_code


def _record_run(args: argparse.Namespace, config: Optional[RunConfig], outputs: List[str], exit_code: int,
                duration_s: float, diagnostics: str):
    manager = get_history_manager(args.history_db)
    if manager is None:
        return
    if config is not None:
        parameters = config.model_dump(mode="json", exclude={"command"})
    else:
        parameters = {key: value for key, value in _config_flags(args).items() if value is not None}
    record_id = manager.log_run(args.command, parameters, outputs, exit_code, duration_s, diagnostics)
    if record_id < 0:
        logger.warning("Run was not recorded in %s", manager.db_path)


if __name__ == "__main__":
    sys.exit(main())
