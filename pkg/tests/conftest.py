"""Shared fixtures: fresh settings per test, small spaces and tables, fixture paths."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pytest

from hp_landscape.core.config import reset_settings, set_config_file
from hp_landscape.model.results import ResultsTable
from hp_landscape.model.space import HyperparamSpace

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def fresh_settings():
    """Each test starts from the packaged config.yaml and leaves no logging handlers behind."""
    set_config_file(None)
    yield
    set_config_file(None)
    reset_settings()
    logging.getLogger().handlers.clear()


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def small_results() -> Path:
    return FIXTURES / "small_results.csv"


@pytest.fixture
def two_by_two() -> HyperparamSpace:
    return HyperparamSpace.from_domains({"a": ["a1", "a2"], "b": ["b1", "b2"]})


@pytest.fixture
def flip_table(two_by_two) -> ResultsTable:
    """B's best value flips when A moves: acc(a1,b1)=.9, (a1,b2)=.1, (a2,b1)=.1, (a2,b2)=.95."""
    return ResultsTable(two_by_two, ("D",), np.array([[0.9], [0.1], [0.1], [0.95]]))


@pytest.fixture
def make_table():
    """Build a table from ``{dataset: accuracies in enumeration order}``."""

    def build(space: HyperparamSpace, columns: dict[str, list[float]]) -> ResultsTable:
        return ResultsTable(
            space, tuple(columns), np.column_stack([np.asarray(v, dtype=float) for v in columns.values()])
        )

    return build
