"""Multiple defaults: an ordered list of configs to try first on new data.

Each step scans every config and appends the one that raises the expected best
percentile across benchmarks the most. The search stops as soon as no config improves
it, or after ``max_m`` defaults.
"""

from __future__ import annotations

import logging
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel

from hp_landscape.core.config import get_settings
from hp_landscape.core.errors import OutOfRange, TooFewBenchmarks, UnscoredConfig
from hp_landscape.core.parallel import run_parallel
from hp_landscape.model.space import Value, format_value
from hp_landscape.services.landscape_stats import PercentileTable

logger = logging.getLogger(__name__)

# candidate rows per worker task during a step scan
_SCAN_CHUNK = 4096


def _sorted_mean(values: np.ndarray) -> np.ndarray:
    """Mean over the last axis, summed in ascending order so benchmark order cannot change the bits."""
    ordered = np.sort(values, axis=-1)
    total = np.zeros(ordered.shape[:-1])
    for k in range(ordered.shape[-1]):
        total = total + ordered[..., k]
    return total / ordered.shape[-1]


def _scored_matrix(percentiles: PercentileTable) -> np.ndarray:
    matrix = percentiles.percentiles
    unscored = np.isnan(matrix).any(axis=1)
    if unscored.any():
        raise UnscoredConfig(int(np.argmax(unscored)))
    return matrix


def _prefix_best(matrix: np.ndarray, prefix: Sequence[int]) -> np.ndarray:
    if len(prefix) == 0:
        return np.zeros(matrix.shape[1])
    return matrix[list(prefix)].max(axis=0)


def _indices(percentiles: PercentileTable, prefix: Sequence[Any]) -> list[int]:
    """Accept configs (tuples of values) or config indices."""
    return [int(c) if isinstance(c, (int, np.integer)) else percentiles.space.index_of(c) for c in prefix]


def expected_best(percentiles: PercentileTable, prefix: Sequence[Any]) -> float:
    """Mean over benchmarks of the best percentile reached by ``prefix``; 0 for an empty prefix."""
    indices = _indices(percentiles, prefix)
    matrix = percentiles.percentiles
    for index in indices:
        if np.isnan(matrix[index]).any():
            raise UnscoredConfig(index)
    if not indices:
        return 0.0
    return float(_sorted_mean(_prefix_best(matrix, indices)))


def step_gains(percentiles: PercentileTable, prefix: Sequence[Any], jobs: Optional[int] = None) -> np.ndarray:
    """Expected best after appending each candidate config to ``prefix``, indexed by config."""
    matrix = _scored_matrix(percentiles)
    current = _prefix_best(matrix, _indices(percentiles, prefix))
    chunks = [matrix[i : i + _SCAN_CHUNK] for i in range(0, matrix.shape[0], _SCAN_CHUNK)]
    parts = run_parallel(lambda rows: _sorted_mean(np.maximum(rows, current)), chunks, jobs)
    return np.concatenate(parts)


class DefaultsSequence(BaseModel):
    """Chosen defaults with the expected best after each prefix.

    ``percentiles[k]`` holds default k's percentile per benchmark and ``best[k]`` the
    running max per benchmark over defaults 0..k.
    """

    hyperparams: list[str]
    datasets: list[str]
    configs: list[list[Value]]
    config_indices: list[int]
    trajectory: list[float]
    percentiles: list[list[float]]
    best: list[list[float]]

    @property
    def m(self) -> int:
        return len(self.configs)

    def to_frame(self) -> pd.DataFrame:
        """One row per default: hyperparameter values, percentile per benchmark, expected best."""
        records = [
            [format_value(v) for v in config] + list(row) + [e]
            for config, row, e in zip(self.configs, self.percentiles, self.trajectory)
        ]
        return pd.DataFrame(records, columns=self.hyperparams + self.datasets + ["expected_best"])

    def curve_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"k": range(1, self.m + 1), "E": self.trajectory})


def greedy_defaults(
    percentiles: PercentileTable, max_m: Optional[int] = None, jobs: Optional[int] = None
) -> DefaultsSequence:
    if max_m is None:
        max_m = get_settings().max_m
    if max_m < 1:
        raise ValueError(f"max_m must be at least 1, got {max_m}")
    matrix = _scored_matrix(percentiles)

    chosen: list[int] = []
    trajectory: list[float] = []
    best_rows: list[list[float]] = []
    previous = 0.0
    while len(chosen) < max_m:
        gains = step_gains(percentiles, chosen, jobs)
        candidate = int(np.argmax(gains))
        value = float(gains[candidate])
        if value <= previous:
            logger.debug("No config improves E=%.6f; stopping after %d default(s)", previous, len(chosen))
            break
        chosen.append(candidate)
        trajectory.append(value)
        best_rows.append(_prefix_best(matrix, chosen).tolist())
        logger.debug("Default %d: config #%d, E=%.6f", len(chosen), candidate, value)
        previous = value

    logger.info("Selected %d default(s); final E=%.6f", len(chosen), previous)
    space = percentiles.space
    return DefaultsSequence(
        hyperparams=list(space.names),
        datasets=list(percentiles.datasets),
        configs=[list(space.config_at(i)) for i in chosen],
        config_indices=chosen,
        trajectory=trajectory,
        percentiles=[matrix[i].tolist() for i in chosen],
        best=best_rows,
    )


def performance_curve(seq: DefaultsSequence, k: int) -> float:
    """Expected best after the first ``k`` defaults."""
    if not 1 <= k <= seq.m:
        raise OutOfRange(k, seq.m)
    return seq.trajectory[k - 1]


class LooFold(BaseModel):
    holdout: str
    defaults: list[int]
    best_percentile: float


class LooReport(BaseModel):
    folds: list[LooFold]
    mean: float

    def to_frame(self) -> pd.DataFrame:
        rows = [[f.holdout, len(f.defaults), f.best_percentile] for f in self.folds]
        rows.append(["mean", None, self.mean])
        return pd.DataFrame(rows, columns=["holdout", "defaults", "best_percentile"], dtype=object)


def loo_evaluate(
    percentiles: PercentileTable, max_m: Optional[int] = None, jobs: Optional[int] = None
) -> LooReport:
    """Pick defaults on all benchmarks but one, score them on the one left out; cycle over all."""
    datasets = list(percentiles.datasets)
    if len(datasets) < 2:
        raise TooFewBenchmarks(len(datasets))
    matrix = _scored_matrix(percentiles)

    def fold(position: int) -> LooFold:
        training = [d for i, d in enumerate(datasets) if i != position]
        seq = greedy_defaults(percentiles.subset_datasets(training), max_m, jobs=1)
        best = float(matrix[seq.config_indices, position].max()) if seq.m else 0.0
        logger.debug("Holdout %s: %d default(s), best percentile %.6f", datasets[position], seq.m, best)
        return LooFold(holdout=datasets[position], defaults=seq.config_indices, best_percentile=best)

    folds = run_parallel(fold, range(len(datasets)), jobs)
    mean = float(_sorted_mean(np.array([f.best_percentile for f in folds])))
    logger.info("Leave-one-out over %d benchmark(s): mean holdout best %.6f", len(datasets), mean)
    return LooReport(folds=folds, mean=mean)
