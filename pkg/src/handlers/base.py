"""
Shared pieces for subcommand handlers.

A handler takes the validated RunConfig and the output directory and
returns an ``Outcome``; ``main`` turns it into stdout lines, a ledger entry
and an exit code.
"""
import argparse
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List

from src.services.logger import get_logger

logger = get_logger("cli")

COMMON_FLAGS_HELP = "common flags: --config, --out, --seed, --grid-M, --rmax"


@dataclass
class Outcome:
    ok: bool
    summary: Dict[str, Any]
    artifacts: List[Path] = field(default_factory=list)


def add_subcommand(subparsers, name: str, handler, summary: str, anchors, parents):
    """Register ``name`` with a help text listing the identities it exercises."""
    epilog = "identities:\n" + "\n".join(f"  {a}" for a in anchors) + "\n\n" + COMMON_FLAGS_HELP
    parser = subparsers.add_parser(
        name,
        help=summary,
        description=summary,
        epilog=epilog,
        parents=parents,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.set_defaults(handler=handler, subcommand=name)
    return parser
