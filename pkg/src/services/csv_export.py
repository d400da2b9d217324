"""
CSV Export - deterministic artifacts for fields and reports.

Every writer renders numbers through ``format_number`` and replaces the
target atomically, so two runs with the same config produce identical bytes.

Usage:
    from src.services.csv_export import write_radial_field

    write_radial_field(out_dir / "sp_minimizer.csv", report.minimizer, precision=12)
"""
import csv
import io
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from grids import RadialField, TensorField
from utils import DEFAULT_PRECISION, atomic_write_text, format_number

RADIAL_HEADER = ("r", "value")
TENSOR_HEADER = ("x1", "x2", "x3", "value")
CHECK_HEADER = ("name", "anchor", "measured", "target", "tolerance", "passed")
KEY_VALUE_HEADER = ("key", "value")


def _cell(value, precision: int) -> str:
    if isinstance(value, str):
        return value
    if value is None:
        return ""
    return format_number(value, precision)


def render_rows(header: Sequence[str], rows: Iterable[Sequence], precision: int = DEFAULT_PRECISION) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v, precision) for v in row])
    return buffer.getvalue()


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence],
               precision: int = DEFAULT_PRECISION) -> Path:
    return atomic_write_text(path, render_rows(header, rows, precision))


def write_radial_field(path: Path, field: RadialField, precision: int = DEFAULT_PRECISION) -> Path:
    """Columns r,value."""
    rows = zip(field.grid.r.tolist(), field.vals.tolist())
    return write_rows(path, RADIAL_HEADER, rows, precision)


def write_tensor_field(path: Path, field: TensorField, precision: int = DEFAULT_PRECISION) -> Path:
    """Columns x1,x2,x3,value in C order over the lattice."""
    coords = [c.ravel().tolist() for c in field.grid.coords]
    rows = zip(*coords, field.flat_vals.tolist())
    return write_rows(path, TENSOR_HEADER, rows, precision)


def write_check_report(path: Path, records, precision: int = DEFAULT_PRECISION) -> Path:
    """One row per CheckRecord."""
    return write_rows(path, CHECK_HEADER, (r.row() for r in records), precision)


def write_key_values(path: Path, values: Mapping, precision: int = DEFAULT_PRECISION) -> Path:
    """Two-column summary in insertion order."""
    return write_rows(path, KEY_VALUE_HEADER, values.items(), precision)
