"""Deterministic, atomic writing of CSV and JSON artifacts."""

from __future__ import annotations

import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

import pandas as pd
from pydantic import BaseModel

logger = logging.getLogger(__name__)


def atomic_write_bytes(path: Path, data: bytes) -> None:
    """Write to a temp file next to ``path`` then rename over it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    logger.info("Wrote %s (%d bytes)", path, len(data))


def atomic_write_text(path: Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def emit(text: str, output: Optional[Path]) -> None:
    """Write ``text`` atomically to ``output``, or to stdout when no path is given."""
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        atomic_write_text(output, text)


def frame_to_csv(frame: pd.DataFrame) -> str:
    """CSV text with Unix line endings; missing values become empty fields."""
    return frame.to_csv(index=False, lineterminator="\n", na_rep="")


def model_to_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2) + "\n"
