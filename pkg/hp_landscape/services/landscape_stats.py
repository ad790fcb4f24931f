"""Descriptive statistics over results tables.

Per-value mean accuracies, Tukey five-number summaries, percentile transforms and
cross-version correlation matrices. Every function is pure over an immutable
ResultsTable; summation always runs in ascending config index.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Iterator, Literal, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, model_validator
from scipy.stats import rankdata

from hp_landscape.core.errors import EmptyInput, RangeError, SpaceMismatch, TooFewConfigs, UnknownDataset
from hp_landscape.core.parallel import run_parallel
from hp_landscape.model.results import ResultsTable
from hp_landscape.model.space import Config, HyperparamSpace, Value, format_value

logger = logging.getLogger(__name__)

MEAN_ROW_LABEL = "mean accuracy"

CorrelationMethod = Literal["pearson", "spearman"]


# --- per-value means ---


def value_mean_accuracy(table: ResultsTable, dataset: str, hyperparam: str) -> dict[Value, float]:
    """Mean accuracy of every config carrying each domain value of ``hyperparam``.

    Values whose configs are all missing on ``dataset`` are omitted.
    """
    position = table.space.position(hyperparam)
    vector = table.dataset_vector(dataset)
    digits = table.space.index_grid()[:, position]
    present = ~np.isnan(vector)
    means: dict[Value, float] = {}
    for j, value in enumerate(table.space.hyperparams[position].values):
        selected = vector[(digits == j) & present]
        if selected.size:
            means[value] = float(np.mean(selected))
    return means


class ValueMeanRow(BaseModel):
    value: Value
    means: dict[str, Optional[float]]


class ValueMeanTable(BaseModel):
    """Values × datasets matrix of mean accuracies with an overall mean row."""

    hyperparam: str
    datasets: list[str]
    rows: list[ValueMeanRow]
    overall: dict[str, Optional[float]]

    def to_frame(self) -> pd.DataFrame:
        records = [[format_value(r.value)] + [r.means[d] for d in self.datasets] for r in self.rows]
        records.append([MEAN_ROW_LABEL] + [self.overall[d] for d in self.datasets])
        return pd.DataFrame(records, columns=[self.hyperparam] + self.datasets)


def value_mean_table(
    table: ResultsTable, hyperparam: str, datasets: Optional[Sequence[str]] = None
) -> ValueMeanTable:
    datasets = list(datasets) if datasets is not None else list(table.datasets)
    per_dataset = {d: value_mean_accuracy(table, d, hyperparam) for d in datasets}
    rows = [
        ValueMeanRow(value=v, means={d: per_dataset[d].get(v) for d in datasets})
        for v in table.space.domain(hyperparam)
        if any(v in per_dataset[d] for d in datasets)
    ]
    overall: dict[str, Optional[float]] = {}
    for d in datasets:
        vector = table.dataset_vector(d)
        present = vector[~np.isnan(vector)]
        overall[d] = float(np.mean(present)) if present.size else None
    return ValueMeanTable(hyperparam=hyperparam, datasets=datasets, rows=rows, overall=overall)


# --- five-number summaries ---


class FiveNumberSummary(BaseModel):
    """Tukey's five numbers; quartiles by linear interpolation at (N-1)·q."""

    min: float
    q25: float
    median: float
    q75: float
    max: float

    @model_validator(mode="after")
    def check_order(self) -> "FiveNumberSummary":
        if not (self.min <= self.q25 <= self.median <= self.q75 <= self.max):
            raise ValueError(f"five-number summary is not ordered: {self.as_tuple()}")
        return self

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.min, self.q25, self.median, self.q75, self.max)


def five_number(accuracies: Sequence[float] | np.ndarray) -> FiveNumberSummary:
    values = np.asarray(accuracies, dtype=np.float64).ravel()
    if values.size == 0:
        raise EmptyInput("accuracy list")
    if not np.all(np.isfinite(values)):
        raise RangeError(float(values[~np.isfinite(values)][0]))
    q25, median, q75 = np.quantile(values, [0.25, 0.5, 0.75], method="linear")
    return FiveNumberSummary(
        min=float(values.min()),
        q25=float(q25),
        median=float(median),
        q75=float(q75),
        max=float(values.max()),
    )


def grouped_five_number(table: ResultsTable, dataset: str, hyperparam: str) -> dict[Value, FiveNumberSummary]:
    """Box-plot data: one summary per domain value that has scored configs."""
    position = table.space.position(hyperparam)
    vector = table.dataset_vector(dataset)
    digits = table.space.index_grid()[:, position]
    present = ~np.isnan(vector)
    summaries: dict[Value, FiveNumberSummary] = {}
    for j, value in enumerate(table.space.hyperparams[position].values):
        selected = vector[(digits == j) & present]
        if selected.size:
            summaries[value] = five_number(selected)
    return summaries


# --- percentiles ---


def _strictly_lower_counts(values: np.ndarray) -> np.ndarray:
    """For each value, how many other values are strictly smaller (exact float comparison)."""
    return (rankdata(values, method="min") - 1).astype(np.int64)


@dataclass(frozen=True)
class PercentileTable:
    """Percentile of every config per dataset.

    ``counts[i, d]`` is the number of scored configs strictly below config ``i`` on
    dataset ``d`` (-1 when unscored); ``percentiles = counts / (N_d - 1)`` with NaN for
    unscored entries.
    """

    space: HyperparamSpace
    datasets: tuple[str, ...]
    counts: np.ndarray
    scored: tuple[int, ...]

    @property
    def percentiles(self) -> np.ndarray:
        denominators = np.asarray(self.scored, dtype=np.float64) - 1
        result = self.counts / denominators
        result[self.counts < 0] = np.nan
        return result

    def dataset_position(self, dataset: str) -> int:
        try:
            return self.datasets.index(dataset)
        except ValueError:
            raise UnknownDataset(dataset) from None

    def column(self, dataset: str) -> np.ndarray:
        return self.percentiles[:, self.dataset_position(dataset)]

    def percentile(self, config: Sequence[Any], dataset: str) -> Optional[float]:
        value = self.column(dataset)[self.space.index_of(config)]
        return None if np.isnan(value) else float(value)

    def is_complete(self) -> bool:
        return bool(np.all(self.counts >= 0))

    def subset_datasets(self, datasets: Sequence[str]) -> "PercentileTable":
        columns = [self.dataset_position(d) for d in datasets]
        return PercentileTable(
            self.space,
            tuple(datasets),
            self.counts[:, columns],
            tuple(self.scored[c] for c in columns),
        )

    def records(self) -> Iterator[tuple[Config, str, int, float]]:
        """(config, dataset, strictly-lower count, percentile) for every scored entry, in config order."""
        percentiles = self.percentiles
        for index, position in zip(*np.nonzero(self.counts >= 0)):
            yield (
                self.space.config_at(int(index)),
                self.datasets[position],
                int(self.counts[index, position]),
                float(percentiles[index, position]),
            )

    def to_frame(self) -> pd.DataFrame:
        """Long format: one row per scored (config, dataset)."""
        rows = [
            [format_value(v) for v in config] + [dataset, count, percentile]
            for config, dataset, count, percentile in self.records()
        ]
        return pd.DataFrame(
            rows, columns=list(self.space.names) + ["dataset", "lower_count", "percentile"]
        )


def _dataset_counts(table: ResultsTable, dataset: str) -> tuple[np.ndarray, int]:
    vector = table.dataset_vector(dataset)
    present = ~np.isnan(vector)
    scored = int(present.sum())
    if scored < 2:
        raise TooFewConfigs(dataset, scored)
    counts = np.full(vector.shape, -1, dtype=np.int64)
    counts[present] = _strictly_lower_counts(vector[present])
    return counts, scored


def percentile_transform(table: ResultsTable, dataset: str) -> PercentileTable:
    """Percentile slice for one dataset."""
    counts, scored = _dataset_counts(table, dataset)
    return PercentileTable(table.space, (dataset,), counts[:, None], (scored,))


def percentile_table(table: ResultsTable) -> PercentileTable:
    """Percentiles of every dataset in the table, computed against all scored configs."""
    columns = [_dataset_counts(table, d) for d in table.datasets]
    counts = np.stack([c for c, _ in columns], axis=1)
    logger.info("Percentile table over %d dataset(s)", len(table.datasets))
    return PercentileTable(table.space, table.datasets, counts, tuple(n for _, n in columns))


# --- cross-version correlation ---


class CorrelationMatrix(BaseModel):
    """Symmetric correlation matrix between versions; ``None`` marks an undefined entry."""

    method: CorrelationMethod
    dataset: str
    labels: list[str]
    matrix: list[list[Optional[float]]]
    means: dict[str, float]
    undefined: list[str]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.matrix, columns=self.labels, dtype=object)
        frame.insert(0, "version", self.labels)
        return frame


def _pearson(x: np.ndarray, y: np.ndarray) -> Optional[float]:
    cx = x - np.mean(x)
    cy = y - np.mean(y)
    sxx = float(np.dot(cx, cx))
    syy = float(np.dot(cy, cy))
    if sxx == 0.0 or syy == 0.0:
        return None
    r = float(np.dot(cx, cy)) / float(np.sqrt(sxx * syy))
    return min(1.0, max(-1.0, r))


def _version_vector(table: ResultsTable, dataset: Optional[str]) -> tuple[str, np.ndarray]:
    if dataset is None:
        if len(table.datasets) != 1:
            raise SpaceMismatch(
                f"tables hold several datasets {list(table.datasets)}; name the one to correlate"
            )
        dataset = table.datasets[0]
    vector = table.dataset_vector(dataset)
    if np.isnan(vector).any():
        raise SpaceMismatch(f"dataset '{dataset}' is incomplete in one of the tables")
    return dataset, vector


def cross_version_correlation(
    tables: Sequence[ResultsTable],
    labels: Optional[Sequence[str]] = None,
    dataset: Optional[str] = None,
    method: CorrelationMethod = "pearson",
    jobs: Optional[int] = None,
) -> CorrelationMatrix:
    """Correlate the accuracy vectors of several versions of one dataset, aligned by config.

    With ``method="spearman"`` the vectors are replaced by their average ranks first.
    A version with constant accuracy makes its row and column undefined.
    """
    if len(tables) == 0:
        raise EmptyInput("table list")
    labels = list(labels) if labels is not None else [f"v{i}" for i in range(len(tables))]
    if len(labels) != len(tables):
        raise SpaceMismatch(f"{len(labels)} label(s) for {len(tables)} table(s)")
    space = tables[0].space
    for label, table in zip(labels, tables):
        if table.space != space:
            raise SpaceMismatch(f"version '{label}' uses a different hyperparameter space")
    if space.size < 2:
        raise SpaceMismatch("correlation needs at least 2 configs")

    resolved = [_version_vector(t, dataset) for t in tables]
    names = {d for d, _ in resolved}
    if dataset is None and len(names) > 1:
        logger.warning("Correlating different dataset ids across versions: %s", sorted(names))
    vectors = [v for _, v in resolved]
    means = {label: float(np.mean(v)) for label, v in zip(labels, vectors)}
    if method == "spearman":
        vectors = [rankdata(v, method="average") for v in vectors]

    undefined = [label for label, v in zip(labels, vectors) if np.ptp(v) == 0]
    for label in undefined:
        logger.warning("Version '%s' has zero accuracy variance; its correlations are undefined", label)

    n = len(vectors)
    pairs = list(combinations(range(n), 2))
    values = run_parallel(lambda ij: _pearson(vectors[ij[0]], vectors[ij[1]]), pairs, jobs)
    matrix: list[list[Optional[float]]] = [[None] * n for _ in range(n)]
    for i in range(n):
        if labels[i] not in undefined:
            matrix[i][i] = 1.0
    for (i, j), r in zip(pairs, values):
        matrix[i][j] = matrix[j][i] = r

    return CorrelationMatrix(
        method=method,
        dataset=resolved[0][0],
        labels=labels,
        matrix=matrix,
        means=means,
        undefined=undefined,
    )
