"""Unit tests for greedy multiple defaults and their leave-one-out evaluation."""

from itertools import combinations

import numpy as np
import pytest

from hp_landscape.core.errors import OutOfRange, TooFewBenchmarks, UnscoredConfig
from hp_landscape.model.results import ResultsTable
from hp_landscape.model.space import HyperparamSpace
from hp_landscape.services.defaults_search import (
    expected_best,
    greedy_defaults,
    loo_evaluate,
    performance_curve,
    step_gains,
)
from hp_landscape.services.landscape_stats import PercentileTable, percentile_table


def _counts_table(counts: list[list[int]]) -> PercentileTable:
    """A percentile table straight from strictly-lower counts (configs × datasets)."""
    array = np.asarray(counts, dtype=np.int64)
    space = HyperparamSpace.from_domains({"c": list(range(array.shape[0]))})
    datasets = tuple(f"D{i}" for i in range(array.shape[1]))
    return PercentileTable(space, datasets, array, (array.shape[0],) * array.shape[1])


@pytest.fixture
def anti_correlated() -> PercentileTable:
    """Two benchmarks ranking five configs in opposite orders."""
    return _counts_table([[i, 4 - i] for i in range(5)])


@pytest.fixture
def rotated_table() -> PercentileTable:
    """Three configs, three benchmarks; each benchmark prefers a different config."""
    space = HyperparamSpace.from_domains({"c": [0, 1, 2]})
    accuracies = np.array([[0.9, 0.1, 0.5], [0.5, 0.9, 0.1], [0.1, 0.5, 0.9]])
    return percentile_table(ResultsTable(space, ("A", "B", "C"), accuracies))


@pytest.fixture
def random_percentiles() -> PercentileTable:
    space = HyperparamSpace.from_domains({"a": list(range(8)), "b": list(range(6))})
    rng = np.random.default_rng(21)
    table = ResultsTable(space, ("P", "Q", "R", "S"), rng.uniform(0.2, 0.95, size=(space.size, 4)))
    return percentile_table(table)


# --- expected best ---


def test_expected_best_of_two_defaults():
    """Counts 96 and 57 of 100 lower configs give percentiles .96 and .57."""
    counts = np.column_stack([np.arange(101), np.arange(101)[::-1]])
    table = _counts_table(counts.tolist())
    assert expected_best(table, [96, 43]) == pytest.approx(0.765)
    assert expected_best(table, [(96,), (43,)]) == pytest.approx(0.765)


def test_expected_best_of_empty_prefix_is_zero(anti_correlated):
    assert expected_best(anti_correlated, []) == 0.0


def test_expected_best_rejects_unscored_config():
    table = _counts_table([[0, 1], [-1, 0], [2, 2]])
    with pytest.raises(UnscoredConfig):
        expected_best(table, [1])


# --- greedy search ---


def test_single_benchmark_stops_after_the_best_config():
    table = _counts_table([[1], [3], [0], [2]])
    seq = greedy_defaults(table)
    assert seq.config_indices == [1]
    assert seq.trajectory == [1.0]


def test_anti_correlated_pair_needs_two_defaults(anti_correlated):
    seq = greedy_defaults(anti_correlated)
    assert seq.config_indices == [0, 4]
    assert seq.trajectory == pytest.approx([0.5, 1.0])
    brute = max(expected_best(anti_correlated, list(pair)) for pair in combinations(range(5), 2))
    assert seq.trajectory[1] == pytest.approx(brute)
    assert seq.best[-1] == [1.0, 1.0]


def test_each_step_is_the_best_single_addition(random_percentiles):
    seq = greedy_defaults(random_percentiles, max_m=6)
    for k, chosen in enumerate(seq.config_indices):
        prefix = seq.config_indices[:k]
        gains = step_gains(random_percentiles, prefix)
        manual = [expected_best(random_percentiles, prefix + [c]) for c in range(random_percentiles.space.size)]
        np.testing.assert_allclose(gains, manual, rtol=0, atol=1e-12)
        assert chosen == int(np.argmax(gains))
        assert seq.trajectory[k] == gains[chosen]


def test_trajectory_strictly_increases_and_is_bounded(random_percentiles):
    seq = greedy_defaults(random_percentiles)
    assert all(later > earlier for earlier, later in zip(seq.trajectory, seq.trajectory[1:]))
    assert 0.0 < seq.trajectory[0] and seq.trajectory[-1] <= 1.0
    assert seq.m <= 25


def test_max_m_truncates(random_percentiles):
    seq = greedy_defaults(random_percentiles, max_m=2)
    assert seq.m == 2
    assert performance_curve(seq, 2) == seq.trajectory[1]
    with pytest.raises(ValueError):
        greedy_defaults(random_percentiles, max_m=0)


def test_benchmark_order_does_not_change_the_defaults(random_percentiles):
    reordered = random_percentiles.subset_datasets(["S", "Q", "P", "R"])
    first, second = greedy_defaults(random_percentiles), greedy_defaults(reordered)
    assert first.config_indices == second.config_indices
    assert first.trajectory == second.trajectory


@pytest.mark.parametrize("seed", [8, 9, 10, 11, 12])
def test_defaults_ignore_monotone_transforms(seed):
    space = HyperparamSpace.from_domains({"a": list(range(5)), "b": list(range(4))})
    rng = np.random.default_rng(seed)
    table = ResultsTable(space, ("X", "Y", "Z"), rng.uniform(0.1, 0.9, size=(space.size, 3)))
    cubed = table.map_accuracies(lambda a: a**3)
    assert greedy_defaults(percentile_table(table)) == greedy_defaults(percentile_table(cubed))


def test_defaults_same_for_any_worker_count(random_percentiles):
    assert greedy_defaults(random_percentiles, jobs=1) == greedy_defaults(random_percentiles, jobs=4)


def test_greedy_rejects_incomplete_tables():
    with pytest.raises(UnscoredConfig):
        greedy_defaults(_counts_table([[0, 1], [-1, 0], [2, 2]]))


def test_performance_curve_out_of_range(anti_correlated):
    seq = greedy_defaults(anti_correlated)
    assert performance_curve(seq, 1) == pytest.approx(0.5)
    for k in (0, seq.m + 1):
        with pytest.raises(OutOfRange):
            performance_curve(seq, k)


def test_sequence_frames(anti_correlated):
    seq = greedy_defaults(anti_correlated)
    frame = seq.to_frame()
    assert list(frame.columns) == ["c", "D0", "D1", "expected_best"]
    assert list(frame["c"]) == ["0", "4"]
    assert list(seq.curve_frame()["k"]) == [1, 2]


# --- leave-one-out ---


def test_loo_on_identical_benchmarks_scores_one():
    space = HyperparamSpace.from_domains({"a": list(range(7))})
    column = np.random.default_rng(2).uniform(0.1, 0.9, size=(7, 1))
    table = ResultsTable(space, ("A", "B", "C"), np.repeat(column, 3, axis=1))
    report = loo_evaluate(percentile_table(table))
    assert [f.best_percentile for f in report.folds] == [1.0, 1.0, 1.0]
    assert report.mean == 1.0


def test_loo_trace_on_rotated_preferences(rotated_table):
    """Each fold learns the two configs its training benchmarks like, neither of them the holdout's best."""
    report = loo_evaluate(rotated_table)
    assert [(f.holdout, f.defaults) for f in report.folds] == [("A", [2, 1]), ("B", [0, 2]), ("C", [1, 0])]
    assert [f.best_percentile for f in report.folds] == [0.5, 0.5, 0.5]
    assert report.mean == pytest.approx(0.5)
    frame = report.to_frame()
    assert list(frame["holdout"]) == ["A", "B", "C", "mean"]


def test_loo_needs_two_benchmarks():
    with pytest.raises(TooFewBenchmarks):
        loo_evaluate(_counts_table([[0], [1]]))


def test_loo_same_for_any_worker_count(random_percentiles):
    assert loo_evaluate(random_percentiles, max_m=4, jobs=1) == loo_evaluate(random_percentiles, max_m=4, jobs=3)
