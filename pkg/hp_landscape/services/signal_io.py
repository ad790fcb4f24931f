"""Signal and window-set file formats.

* single-channel CSV: one sample per line, no header; the rate comes from the caller.
* binary container (``.bin``): a 24-byte little-endian header (magic ``HPLS``,
  version u32, rate f64, length u64) followed by ``length`` float64 samples.
* window-set CSV: header ``x0..x{L-1},label``, one window per row; the label field is
  empty for unlabeled sets.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from hp_landscape.core.errors import InvalidSignal, ParseError
from hp_landscape.core.output import atomic_write_bytes, atomic_write_text, frame_to_csv
from hp_landscape.services.signal_ops import Signal, WindowSet

logger = logging.getLogger(__name__)

MAGIC = b"HPLS"
FORMAT_VERSION = 1
HEADER = np.dtype([("magic", "S4"), ("version", "<u4"), ("rate", "<f8"), ("length", "<u8")])
BINARY_SUFFIX = ".bin"
LABEL_COLUMN = "label"


def is_binary(path: Path) -> bool:
    return Path(path).suffix.lower() == BINARY_SUFFIX


def _numeric_column(path: Path, text: pd.Series, first_line: int) -> np.ndarray:
    values = pd.to_numeric(text.str.strip(), errors="coerce").to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        first = int(np.argmax(bad))
        raise ParseError(path, first + first_line, f"sample {text.iloc[first]!r} is not a finite number")
    return values


def read_signal_csv(path: Path, rate: float) -> Signal:
    path = Path(path)
    if not path.exists():
        raise ParseError(path, None, "signal file not found")
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        return Signal(np.zeros(0), rate)
    except pd.errors.ParserError as e:
        raise ParseError(path, None, f"expected one sample per line: {e}") from e
    if frame.shape[1] != 1:
        raise ParseError(path, 1, f"expected one sample per line, found {frame.shape[1]} fields")
    return Signal(_numeric_column(path, frame[0], 1), rate)


def signal_csv_text(signal: Signal) -> str:
    return "".join(f"{x!r}\n" for x in signal.samples.tolist())


def write_signal_csv(signal: Signal, path: Path) -> None:
    atomic_write_text(Path(path), signal_csv_text(signal))


def read_signal_binary(path: Path) -> Signal:
    path = Path(path)
    if not path.exists():
        raise ParseError(path, None, "signal file not found")
    data = path.read_bytes()
    if len(data) < HEADER.itemsize:
        raise ParseError(path, None, f"truncated header ({len(data)} of {HEADER.itemsize} bytes)")
    header = np.frombuffer(data, dtype=HEADER, count=1)[0]
    if bytes(header["magic"]) != MAGIC:
        raise ParseError(path, None, f"bad magic {bytes(header['magic'])!r}")
    if int(header["version"]) != FORMAT_VERSION:
        raise ParseError(path, None, f"unsupported container version {int(header['version'])}")
    length = int(header["length"])
    payload = data[HEADER.itemsize :]
    if len(payload) != length * 8:
        raise ParseError(path, None, f"header declares {length} samples but {len(payload)} payload bytes follow")
    samples = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return Signal(samples, float(header["rate"]))


def write_signal_binary(signal: Signal, path: Path) -> None:
    header = np.array([(MAGIC, FORMAT_VERSION, signal.rate, len(signal))], dtype=HEADER)
    atomic_write_bytes(Path(path), header.tobytes() + signal.samples.astype("<f8").tobytes())


def read_signal(path: Path, rate: Optional[float] = None) -> Signal:
    """Read a signal by file suffix; CSV input needs ``rate``, binary input carries its own."""
    path = Path(path)
    if is_binary(path):
        signal = read_signal_binary(path)
        if rate is not None and rate != signal.rate:
            logger.warning("Ignoring --rate %s: %s declares %s Hz", rate, path, signal.rate)
        return signal
    if rate is None:
        raise InvalidSignal(f"{path}: a sampling rate is required for CSV input")
    return read_signal_csv(path, rate)


def write_signal(signal: Signal, path: Path) -> None:
    if is_binary(path):
        write_signal_binary(signal, path)
    else:
        write_signal_csv(signal, path)
    logger.info("Wrote %d sample(s) at %s Hz to %s", len(signal), signal.rate, path)


def read_window_set(path: Path, rate: Optional[float] = None) -> WindowSet:
    path = Path(path)
    if not path.exists():
        raise ParseError(path, None, "window-set file not found")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise ParseError(path, 1, "file is empty; a header row is required") from None
    except pd.errors.ParserError as e:
        raise ParseError(path, None, f"malformed row: {e}") from e

    columns = [c.strip() for c in frame.columns]
    sample_columns = [c for c in columns if c != LABEL_COLUMN]
    expected = [f"x{i}" for i in range(len(sample_columns))]
    if not sample_columns or sample_columns != expected:
        raise ParseError(path, 1, f"expected columns x0..x{{L-1}} then '{LABEL_COLUMN}', got {columns}")
    frame.columns = columns

    windows = np.column_stack(
        [_numeric_column(path, frame[c], 2) for c in sample_columns]
    ) if len(frame) else np.zeros((0, len(sample_columns)))

    labels = None
    if LABEL_COLUMN in frame.columns:
        text = frame[LABEL_COLUMN].str.strip()
        blank = (text == "").to_numpy()
        if blank.any() and not blank.all():
            raise ParseError(path, int(np.argmax(blank)) + 2, "label is empty while other windows are labeled")
        if len(frame) and not blank.any():
            labels = tuple(text.tolist())
    return WindowSet(windows, len(sample_columns), rate, labels)


def window_set_frame(windows: WindowSet) -> pd.DataFrame:
    frame = pd.DataFrame(windows.windows, columns=[f"x{i}" for i in range(windows.length)])
    frame[LABEL_COLUMN] = list(windows.labels) if windows.labels is not None else ""
    return frame


def write_window_set(windows: WindowSet, path: Path) -> None:
    atomic_write_text(Path(path), frame_to_csv(window_set_frame(windows)))
    logger.info("Wrote %d window(s) of %d sample(s) to %s", len(windows), windows.length, path)
