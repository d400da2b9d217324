"""
Run ledger - one TinyDB document per CLI invocation.

The ledger sits next to the CSV artifacts as ``runs.json``; it carries
timestamps and therefore never takes part in output comparisons.
"""
from datetime import datetime
from itertools import islice
from pathlib import Path
from typing import Any, Dict, List, Tuple

from tinydb import TinyDB, where

from utils import create_dir_safely

LEDGER_FILE = "runs.json"


def open_ledger(directory: Path) -> TinyDB:
    directory = Path(directory)
    create_dir_safely(directory)
    return TinyDB(directory / LEDGER_FILE)


def record_run(db: TinyDB, entry: Dict[str, Any]) -> int:
    """Insert a run document stamped with the current time."""
    doc = {**entry, "timestamp": datetime.now().isoformat()}
    return db.table("runs").insert(doc)


def runs_for(db: TinyDB, subcommand: str) -> List[Dict[str, Any]]:
    return db.table("runs").search(where("subcommand") == subcommand)


def paginate_db(table, limit=10, offset=0):
    """Helper: paginate TinyDB results (returns page + total count)"""
    all_entries = sorted(table.all(), key=lambda r: r.get("timestamp", ""), reverse=True)
    total = len(all_entries)
    page = list(islice(all_entries, offset, offset + limit))
    return page, total


def recent_runs(db: TinyDB, limit: int = 10, offset: int = 0) -> Tuple[List[Dict[str, Any]], int]:
    """Newest runs first."""
    return paginate_db(db.table("runs"), limit=limit, offset=offset)
