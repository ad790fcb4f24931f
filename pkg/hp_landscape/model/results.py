"""Results tables: the accuracies of a grid search on a set of benchmark datasets."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterator, Mapping, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator

from hp_landscape.core.errors import (
    DomainError,
    DuplicateError,
    ParseError,
    RangeError,
    UnknownDataset,
)
from hp_landscape.core.output import atomic_write_text, frame_to_csv
from hp_landscape.model.space import Config, HyperparamSpace, format_value

logger = logging.getLogger(__name__)

DATASET_COLUMN = "dataset"
ACCURACY_COLUMN = "accuracy"

_PANDAS_LINE_RE = re.compile(r"line (\d+)")
_NAN_TEXTS = {"nan", "+nan", "-nan"}


class BenchmarkSet(BaseModel):
    """Ordered, unique dataset ids."""

    model_config = ConfigDict(frozen=True)

    ids: tuple[str, ...]

    @field_validator("ids")
    @classmethod
    def validate_ids(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        if not v:
            raise ValueError("a benchmark set needs at least one dataset")
        if len(set(v)) != len(v):
            raise ValueError(f"dataset ids must be unique: {list(v)}")
        return v

    @property
    def count(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class ResultsTable:
    """Accuracies indexed by (config index, dataset position); NaN marks a missing entry.

    The accuracy array is read-only, so a table can be shared between workers.
    """

    space: HyperparamSpace
    datasets: tuple[str, ...]
    accuracies: np.ndarray

    def __post_init__(self) -> None:
        array = np.array(self.accuracies, dtype=np.float64)
        expected = (self.space.size, len(self.datasets))
        if array.shape != expected:
            raise ValueError(f"accuracy array has shape {array.shape}, expected {expected}")
        if len(set(self.datasets)) != len(self.datasets):
            raise ValueError(f"dataset ids must be unique: {list(self.datasets)}")
        present = array[~np.isnan(array)]
        if present.size and (not np.all(np.isfinite(present)) or present.min() < 0 or present.max() > 1):
            bad = present[~np.isfinite(present) | (present < 0) | (present > 1)][0]
            raise RangeError(float(bad))
        array.flags.writeable = False
        object.__setattr__(self, "accuracies", array)
        object.__setattr__(self, "datasets", tuple(self.datasets))

    @classmethod
    def empty(cls, space: HyperparamSpace, datasets: Sequence[str]) -> "ResultsTable":
        return cls(space, tuple(datasets), np.full((space.size, len(datasets)), np.nan))

    @classmethod
    def from_rows(
        cls,
        space: HyperparamSpace,
        rows: Mapping[tuple[Config, str], float],
        datasets: Sequence[str] | None = None,
    ) -> "ResultsTable":
        """Build a table from ``{(config, dataset): accuracy}``."""
        if datasets is None:
            datasets = list(dict.fromkeys(d for _, d in rows))
        positions = {d: i for i, d in enumerate(datasets)}
        array = np.full((space.size, len(datasets)), np.nan)
        for (config, dataset), accuracy in rows.items():
            if dataset not in positions:
                raise UnknownDataset(dataset)
            array[space.index_of(config), positions[dataset]] = accuracy
        return cls(space, tuple(datasets), array)

    @property
    def benchmarks(self) -> BenchmarkSet:
        return BenchmarkSet(ids=self.datasets)

    @property
    def entry_count(self) -> int:
        return int(np.count_nonzero(~np.isnan(self.accuracies)))

    @property
    def is_complete(self) -> bool:
        return not np.isnan(self.accuracies).any()

    def dataset_position(self, dataset: str) -> int:
        try:
            return self.datasets.index(dataset)
        except ValueError:
            raise UnknownDataset(dataset) from None

    def dataset_vector(self, dataset: str) -> np.ndarray:
        """Accuracies of every config (enumeration order) on one dataset."""
        return self.accuracies[:, self.dataset_position(dataset)]

    def grid(self, dataset: str) -> np.ndarray:
        """The dataset's accuracies shaped by domain sizes, one axis per hyperparameter."""
        return self.dataset_vector(dataset).reshape(self.space.sizes)

    def accuracy(self, config: Sequence[Any], dataset: str) -> float | None:
        value = self.accuracies[self.space.index_of(config), self.dataset_position(dataset)]
        return None if np.isnan(value) else float(value)

    def rows(self) -> Iterator[tuple[Config, str, float]]:
        """Present entries dataset by dataset (table order), configs in enumeration order within each."""
        for position, index in zip(*np.nonzero(~np.isnan(self.accuracies.T))):
            yield self.space.config_at(index), self.datasets[position], float(self.accuracies[index, position])

    def map_accuracies(self, func: Callable[[np.ndarray], np.ndarray]) -> "ResultsTable":
        """A copy with ``func`` applied to the accuracy array (missing entries stay missing)."""
        mapped = np.array(func(self.accuracies.copy()), dtype=np.float64)
        mapped[np.isnan(self.accuracies)] = np.nan
        return ResultsTable(self.space, self.datasets, mapped)

    def subset_datasets(self, datasets: Sequence[str]) -> "ResultsTable":
        columns = [self.dataset_position(d) for d in datasets]
        return ResultsTable(self.space, tuple(datasets), self.accuracies[:, columns])


class GridReport(BaseModel):
    """Missing-config counts per dataset."""

    total_configs: int
    missing: dict[str, int]
    complete: bool


def validate_grid(table: ResultsTable) -> GridReport:
    counts = np.isnan(table.accuracies).sum(axis=0)
    missing = {d: int(c) for d, c in zip(table.datasets, counts)}
    return GridReport(
        total_configs=table.space.size,
        missing=missing,
        complete=all(c == 0 for c in missing.values()),
    )


def _parser_line(message: str) -> int | None:
    match = _PANDAS_LINE_RE.search(message)
    return int(match.group(1)) if match else None


def load_results(path: Path, space: HyperparamSpace) -> ResultsTable:
    """Read a long-format results CSV and validate it against ``space``.

    Columns: one per hyperparameter, then ``dataset`` and ``accuracy``.
    Line numbers in errors are 1-based file lines (the header is line 1).
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(path, None, "results file not found")
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
            skipinitialspace=True,
            skip_blank_lines=False,
        )
    except pd.errors.EmptyDataError:
        raise ParseError(path, 1, "file is empty; a header row is required") from None
    except pd.errors.ParserError as e:
        raise ParseError(path, _parser_line(str(e)), f"malformed row: {e}") from e
    except UnicodeDecodeError as e:
        raise ParseError(path, None, f"not valid UTF-8: {e}") from e

    expected = list(space.names) + [DATASET_COLUMN, ACCURACY_COLUMN]
    columns = [c.strip() for c in frame.columns]
    if sorted(columns) != sorted(expected):
        raise ParseError(path, 1, f"header {columns} does not match expected columns {expected}")
    frame.columns = columns
    # data row i sits on file line i + 2
    lines = np.arange(len(frame)) + 2
    short = frame.isna().any(axis=1).to_numpy()
    if short.any():
        raise ParseError(path, int(lines[int(np.argmax(short))]), "malformed row: too few fields")
    for column in columns:
        frame[column] = frame[column].str.strip()

    digits = []
    for position, name in enumerate(space.names):
        mapped = frame[name].map(space.lookup(position))
        unknown = mapped.isna().to_numpy()
        if unknown.any():
            first = int(np.argmax(unknown))
            raise DomainError(name, frame[name].iloc[first], int(lines[first]))
        digits.append(mapped.to_numpy(dtype=np.int64))

    datasets = frame[DATASET_COLUMN]
    blank = (datasets == "").to_numpy()
    if blank.any():
        raise ParseError(path, int(lines[int(np.argmax(blank))]), "dataset id is empty")

    text = frame[ACCURACY_COLUMN]
    values = pd.to_numeric(text, errors="coerce").to_numpy(dtype=np.float64)
    unparsable = np.isnan(values) & ~text.str.lower().isin(_NAN_TEXTS).to_numpy()
    if unparsable.any():
        first = int(np.argmax(unparsable))
        raise ParseError(path, int(lines[first]), f"accuracy {text.iloc[first]!r} is not a number")
    with np.errstate(invalid="ignore"):
        out_of_range = ~np.isfinite(values) | (values < 0) | (values > 1)
    if out_of_range.any():
        first = int(np.argmax(out_of_range))
        raise RangeError(text.iloc[first], int(lines[first]))

    dataset_ids = list(dict.fromkeys(datasets))
    dataset_codes = datasets.map({d: i for i, d in enumerate(dataset_ids)}).to_numpy(dtype=np.int64)
    config_codes = (
        np.ravel_multi_index(tuple(digits), space.sizes) if len(frame) else np.zeros(0, dtype=np.int64)
    )

    keys = pd.Series(config_codes * len(dataset_ids) + dataset_codes)
    duplicated = keys.duplicated().to_numpy()
    if duplicated.any():
        first = int(np.argmax(duplicated))
        raise DuplicateError(space.config_at(int(config_codes[first])), datasets.iloc[first], int(lines[first]))

    array = np.full((space.size, len(dataset_ids)), np.nan)
    array[config_codes, dataset_codes] = values
    table = ResultsTable(space, tuple(dataset_ids), array)
    logger.info(
        "Loaded %d result(s) for %d dataset(s) from %s", table.entry_count, len(dataset_ids), path
    )
    return table


def results_frame(table: ResultsTable) -> pd.DataFrame:
    """Long-format frame grouped by dataset in table order; missing entries are skipped.

    load_results reads it back with the same dataset order.
    """
    records = [
        [format_value(v) for v in config] + [dataset, repr(accuracy)]
        for config, dataset, accuracy in table.rows()
    ]
    return pd.DataFrame(records, columns=list(table.space.names) + [DATASET_COLUMN, ACCURACY_COLUMN])


def write_results(table: ResultsTable, path: Path) -> None:
    atomic_write_text(Path(path), frame_to_csv(results_frame(table)))
