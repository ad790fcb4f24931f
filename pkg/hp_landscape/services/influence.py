"""Influence of one hyperparameter on another, and the tuning order it implies.

For every starting config ``c`` of the (possibly restricted) grid: tune B from ``c``;
tune A from ``c`` and move to the result ``c'``; tune B again from ``c'``. Influence of A
on B is the fraction of starting configs where the two tuned values of B differ.
"Tuning" a hyperparameter is the argmax of accuracy along its axis with every other
coordinate held, ties going to the lowest domain index.
"""

from __future__ import annotations

import logging
from itertools import permutations
from typing import Any, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from hp_landscape.core.errors import MissingRows, SameHyperparam, SpaceError
from hp_landscape.core.parallel import run_parallel
from hp_landscape.model.results import ResultsTable
from hp_landscape.model.space import Value

logger = logging.getLogger(__name__)


class InfluenceResult(BaseModel):
    source: str
    target: str
    dataset: str
    difference_count: int
    trial_count: int

    @property
    def probability(self) -> float:
        return self.difference_count / self.trial_count


class InfluenceEntry(BaseModel):
    """Influence of ``source`` on ``target``: unweighted mean over datasets plus per-dataset counts."""

    probability: float = Field(..., ge=0.0, le=1.0)
    per_dataset: dict[str, InfluenceResult] = Field(default_factory=dict)


class InfluenceMatrix(BaseModel):
    """Ordered-pair influences keyed ``matrix[source][target]``; hyperparams in space order."""

    hyperparams: list[str]
    datasets: list[str]
    fixed: dict[str, Value] = Field(default_factory=dict)
    matrix: dict[str, dict[str, InfluenceEntry]]

    @classmethod
    def from_probabilities(
        cls, hyperparams: Sequence[str], probabilities: Mapping[tuple[str, str], float]
    ) -> "InfluenceMatrix":
        """A pooled-only matrix, e.g. for influences transcribed from an earlier study."""
        return cls(
            hyperparams=list(hyperparams),
            datasets=[],
            matrix={
                s: {t: InfluenceEntry(probability=probabilities[(s, t)]) for t in hyperparams if t != s}
                for s in hyperparams
            },
        )

    def probability(self, source: str, target: str, dataset: Optional[str] = None) -> float:
        entry = self.matrix[source][target]
        if dataset is None:
            return entry.probability
        return entry.per_dataset[dataset].probability

    def outgoing(self, source: str) -> float:
        """Total influence of ``source`` on every other hyperparameter."""
        return float(sum(self.matrix[source][t].probability for t in self.hyperparams if t != source))

    def to_frame(self) -> pd.DataFrame:
        """Long format: a pooled row (dataset ``mean``) then one row per dataset for every pair."""
        records: list[list[Any]] = []
        for source, target in permutations(self.hyperparams, 2):
            entry = self.matrix[source][target]
            records.append([source, target, "mean", entry.probability, None, None])
            for dataset in self.datasets:
                r = entry.per_dataset[dataset]
                records.append([source, target, dataset, r.probability, r.difference_count, r.trial_count])
        return pd.DataFrame(
            records,
            columns=["source", "target", "dataset", "influence", "difference_count", "trial_count"],
            dtype=object,
        )

    def square_frame(self) -> pd.DataFrame:
        """Pooled influences as a source × target matrix; the diagonal is empty."""
        rows = [
            [s] + [None if s == t else self.matrix[s][t].probability for t in self.hyperparams]
            for s in self.hyperparams
        ]
        return pd.DataFrame(rows, columns=["source"] + self.hyperparams, dtype=object)


def _scanned_grid(table: ResultsTable, dataset: str, fixed: Optional[Mapping[str, Any]]) -> tuple[np.ndarray, list[int]]:
    """Accuracy grid restricted by ``fixed``, with the space positions of its remaining axes."""
    grid = table.grid(dataset)
    pinned = table.space.assignment(fixed or {})
    index = tuple(pinned.get(p, slice(None)) for p in range(len(table.space.sizes)))
    free = [p for p in range(len(table.space.sizes)) if p not in pinned]
    scanned = grid[index]
    missing = int(np.isnan(scanned).sum())
    if missing:
        raise MissingRows(dataset, missing)
    return scanned, free


def tune(table: ResultsTable, dataset: str, config: Sequence[Any], hyperparam: str) -> Value:
    """Best value of ``hyperparam`` with every other coordinate of ``config`` held."""
    space = table.space
    position = space.position(hyperparam)
    digits = [space.value_index(i, v) for i, v in enumerate(config)]
    index = tuple(slice(None) if i == position else d for i, d in enumerate(digits))
    sweep = table.grid(dataset)[index]
    missing = int(np.isnan(sweep).sum())
    if missing:
        raise MissingRows(dataset, missing)
    return space.hyperparams[position].values[int(np.argmax(sweep))]


def _influence_counts(grid: np.ndarray, a: int, b: int) -> int:
    """Number of starting configs where re-tuning B after tuning A changes B."""
    tuned_b = np.argmax(grid, axis=b, keepdims=True)
    tuned_a = np.broadcast_to(np.argmax(grid, axis=a, keepdims=True), grid.shape)
    retuned_b = np.take_along_axis(tuned_b, tuned_a, axis=a)
    return int(np.count_nonzero(np.broadcast_to(tuned_b, grid.shape) != retuned_b))


def _check_pair(A: str, B: str, fixed: Optional[Mapping[str, Any]]) -> None:
    if A == B:
        raise SameHyperparam(A)
    pinned = set(fixed or {}) & {A, B}
    if pinned:
        raise SpaceError(f"cannot measure influence of a pinned hyperparameter: {sorted(pinned)}")


def influence(
    table: ResultsTable,
    dataset: str,
    A: str,
    B: str,
    fixed: Optional[Mapping[str, Any]] = None,
) -> InfluenceResult:
    """Influence of A on B over every config of the grid, or of the subgrid left free by ``fixed``."""
    _check_pair(A, B, fixed)
    a_pos, b_pos = table.space.position(A), table.space.position(B)
    grid, free = _scanned_grid(table, dataset, fixed)
    differences = _influence_counts(grid, free.index(a_pos), free.index(b_pos))
    result = InfluenceResult(
        source=A, target=B, dataset=dataset, difference_count=differences, trial_count=int(grid.size)
    )
    logger.debug("influence(%s -> %s) on %s: %d/%d", A, B, dataset, differences, grid.size)
    return result


def influence_matrix(
    table: ResultsTable,
    datasets: Optional[Sequence[str]] = None,
    hyperparams: Optional[Sequence[str]] = None,
    fixed: Optional[Mapping[str, Any]] = None,
    jobs: Optional[int] = None,
) -> InfluenceMatrix:
    """Influences for every ordered pair of ``hyperparams`` on each dataset, pooled by unweighted mean."""
    space = table.space
    datasets = list(datasets) if datasets is not None else list(table.datasets)
    names = list(hyperparams) if hyperparams is not None else list(space.names)
    if len(set(names)) != len(names):
        raise SpaceError(f"hyperparameter subset contains duplicates: {names}")
    if len(names) < 2:
        raise SpaceError("an influence matrix needs at least two hyperparameters")
    names.sort(key=space.position)
    for d in datasets:
        table.dataset_position(d)
    pinned = set(fixed or {}) & set(names)
    if pinned:
        raise SpaceError(f"cannot measure influence of a pinned hyperparameter: {sorted(pinned)}")
    space.assignment(fixed or {})

    pairs = list(permutations(names, 2))
    tasks = [(d, s, t) for d in datasets for s, t in pairs]
    results = run_parallel(lambda task: influence(table, task[0], task[1], task[2], fixed), tasks, jobs)
    by_key = {(r.dataset, r.source, r.target): r for r in results}

    matrix: dict[str, dict[str, InfluenceEntry]] = {s: {} for s in names}
    for s, t in pairs:
        per_dataset = {d: by_key[(d, s, t)] for d in datasets}
        pooled = float(np.mean([per_dataset[d].probability for d in datasets])) if datasets else 0.0
        matrix[s][t] = InfluenceEntry(probability=pooled, per_dataset=per_dataset)

    logger.info(
        "Influence matrix over %d hyperparameter(s) and %d dataset(s)", len(names), len(datasets)
    )
    return InfluenceMatrix(
        hyperparams=names,
        datasets=datasets,
        fixed={k: v for k, v in (fixed or {}).items()},
        matrix=matrix,
    )


def tuning_order(matrix: InfluenceMatrix) -> list[str]:
    """Hyperparameters by descending outgoing influence; ties keep matrix (space) order."""
    totals = {name: matrix.outgoing(name) for name in matrix.hyperparams}
    ranked = sorted(range(len(matrix.hyperparams)), key=lambda i: (-totals[matrix.hyperparams[i]], i))
    return [matrix.hyperparams[i] for i in ranked]
