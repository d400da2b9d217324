#!/usr/bin/env python3
"""
critnls - Entry Point

Batch front door for the critical NLS toolkit: parse the config, dispatch
one subcommand, print a key=value summary on stdout and write CSV artifacts
to the output directory. Logs go to stderr as JSON lines.

Exit codes: 0 success, 1 failed check or unsatisfied verdict, 2 usage,
config or parameter error.

This is a slim entry point. All subcommands are in src/handlers/.
"""
import argparse
import logging
import sys
from datetime import datetime
from typing import List, Optional

import humanize
from pydantic import ValidationError

from config import load_config
from database import open_ledger, record_run
from errors import ConfigError, CritNLSError, GridError, NoConvergence, ParamError
from src.handlers import register_all_handlers
from src.services.logger import get_logger, setup_structured_logging
from utils import create_dir_safely, format_number

logger = get_logger("cli")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an unsigned integer")
    if not (0 <= value < 2 ** 64):
        raise argparse.ArgumentTypeError(f"{text} does not fit in 64 unsigned bits")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="[block] / key = value config file")
    common.add_argument("--out", metavar="DIR", help="output directory (default: results)")
    common.add_argument("--seed", type=_seed, help="u64 seed, decimal or 0x-prefixed (default: 0x5EED)")
    common.add_argument("--grid-M", dest="grid_M", type=int, metavar="INT",
                        help="radial grid nodes (default: 4000)")
    common.add_argument("--rmax", type=float, metavar="REAL", help="radial grid extent (default: 40)")
    common.add_argument("--log-level", default="INFO",
                        choices=("DEBUG", "INFO", "WARNING", "ERROR"), help="stderr log level")

    parser = argparse.ArgumentParser(
        prog="critnls",
        description="Variational toolkit for the critical NLS with vanishing or coercive potentials.",
    )
    subparsers = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND", required=True)
    register_all_handlers(subparsers, [common])
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "solver": {"seed": args.seed},
        "grid": {"M": args.grid_M, "r_max": args.rmax},
        "output": {"directory": args.out},
    }


def _print_summary(subcommand: str, summary: dict, precision: int, elapsed: str, stream) -> None:
    for key, value in summary.items():
        text = value if isinstance(value, str) else format_number(value, precision)
        print(f"{key}={text}", file=stream)
    print(f"{subcommand} finished in {elapsed}", file=stream)


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    """Parse ``argv``, run one subcommand and return the exit code."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already named the offending flag on stderr
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    setup_structured_logging(getattr(logging, args.log_level))
    started = datetime.now()

    try:
        cfg = load_config(args.config, _overrides(args))
        out_dir = cfg.output.directory
        create_dir_safely(out_dir)
    except (ConfigError, ParamError, GridError) as e:
        print(f"error: {e}", file=sys.stderr)
        logger.error("config_rejected", error=str(e))
        return EXIT_USAGE
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        print(f"error: {where}: {first['msg']}", file=sys.stderr)
        logger.error("config_rejected", error=str(e))
        return EXIT_USAGE

    logger.info("run_start", subcommand=args.subcommand, digest=cfg.digest(), seed=cfg.solver.seed)
    try:
        outcome = args.handler(cfg, out_dir)
    except (ParamError, GridError) as e:
        print(f"error: {e}", file=sys.stderr)
        logger.error("run_rejected", subcommand=args.subcommand, error=str(e))
        return EXIT_USAGE
    except NoConvergence as e:
        print(f"error: {e}", file=sys.stderr)
        logger.error("run_failed", subcommand=args.subcommand, error=str(e))
        code = EXIT_FAILED
        _ledger(out_dir, args.subcommand, cfg, {"error": str(e)}, code)
        return code
    except CritNLSError as e:
        print(f"error: {e}", file=sys.stderr)
        logger.error("run_failed", subcommand=args.subcommand, error=str(e), exc_info=True)
        return EXIT_FAILED

    elapsed = humanize.precisedelta(datetime.now() - started, minimum_unit="milliseconds")
    _print_summary(args.subcommand, outcome.summary, cfg.output.precision, elapsed, stdout)
    code = EXIT_OK if outcome.ok else EXIT_FAILED
    _ledger(out_dir, args.subcommand, cfg, outcome.summary, code)
    logger.info("run_finished", subcommand=args.subcommand, exit_code=code, elapsed=elapsed,
                artifacts=[str(p) for p in outcome.artifacts])
    return code


def _ledger(out_dir, subcommand: str, cfg, summary: dict, code: int) -> None:
    db = open_ledger(out_dir)
    try:
        headline = {k: v for k, v in summary.items() if isinstance(v, (int, float, str, bool))}
        record_run(db, {"subcommand": subcommand, "seed": cfg.solver.seed, "config_digest": cfg.digest(),
                        "exit_code": code, "summary": headline})
    finally:
        db.close()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
