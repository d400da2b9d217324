"""
Handlers Package - Centralized subcommand registration.

Each module exposes ``register(subparsers, parents)`` and attaches a
handler callable to the parsers it creates.
"""
from . import audit, ground_state, threshold


def register_all_handlers(subparsers, parents):
    """
    Register every subcommand.

    Args:
        subparsers: argparse sub-parser action from the top-level parser
        parents: parent parsers carrying the shared flags
    """
    ground_state.register(subparsers, parents)
    threshold.register(subparsers, parents)
    audit.register(subparsers, parents)
