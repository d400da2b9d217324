import hashlib
import json
import os
import tempfile
from pathlib import Path

from tenacity import retry, stop_after_attempt, wait_exponential

from src.services.logger import get_logger

logger = get_logger("utils")

DEFAULT_PRECISION = 12


def format_number(x: float, precision: int = DEFAULT_PRECISION) -> str:
    """Locale-free decimal rendering with ``precision`` significant digits."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(float(x), f".{precision}g")


@retry(stop=stop_after_attempt(3), wait=wait_exponential(multiplier=1, min=1, max=10))
def create_dir_safely(path: Path):
    path = Path(path)
    if not path.exists():
        logger.info("creating_directory", path=str(path))
    path.mkdir(parents=True, exist_ok=True)


@retry(stop=stop_after_attempt(3), wait=wait_exponential(multiplier=1, min=1, max=10))
def _replace(src: str, dest: Path):
    os.replace(src, dest)


def atomic_write_text(path: Path, text: str) -> Path:
    """Write to a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    create_dir_safely(path.parent)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        _replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def config_digest(payload: dict) -> str:
    """Stable short hash of a JSON-serialisable config dump."""
    canonical = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
