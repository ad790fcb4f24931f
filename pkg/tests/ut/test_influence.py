"""Unit tests for tuning, influence probabilities and the implied tuning order."""

from itertools import product

import numpy as np
import pytest

from hp_landscape.core.errors import MissingRows, SameHyperparam, SpaceError, UnknownHyperparam
from hp_landscape.model.results import ResultsTable
from hp_landscape.model.space import HyperparamSpace
from hp_landscape.services.influence import (
    InfluenceMatrix,
    influence,
    influence_matrix,
    tune,
    tuning_order,
)
from hp_landscape.services.synthetic_oracle import brute_force_influence, generate, random_landscape


@pytest.fixture
def three_space():
    return HyperparamSpace.from_domains({"x": [1, 2, 3], "y": [10, 20, 30, 40], "z": ["p", "q"]})


def _loop_influence(table, dataset, source, target, fixed=None):
    """(difference count, trial count) from nested loops over the raw domains."""
    space = table.space
    names = list(space.names)
    domains = [list(h.values) for h in space.hyperparams]
    s, t = names.index(source), names.index(target)

    def best(config, position):
        chosen, score = None, None
        for value in domains[position]:
            candidate = list(config)
            candidate[position] = value
            accuracy = table.accuracy(tuple(candidate), dataset)
            if score is None or accuracy > score:
                chosen, score = value, accuracy
        return chosen

    differences = trials = 0
    for config in product(*domains):
        if any(config[names.index(k)] != v for k, v in (fixed or {}).items()):
            continue
        trials += 1
        moved = list(config)
        moved[s] = best(config, s)
        if best(config, t) != best(tuple(moved), t):
            differences += 1
    return differences, trials


# --- tune ---


@pytest.mark.parametrize(
    "config,hyperparam,expected",
    [
        (("a1", "b1"), "b", "b1"),
        (("a1", "b2"), "b", "b1"),
        (("a2", "b1"), "b", "b2"),
        (("a1", "b2"), "a", "a2"),
        (("a2", "b1"), "a", "a1"),
    ],
)
def test_tune_picks_best_value_with_others_held(flip_table, config, hyperparam, expected):
    assert tune(flip_table, "D", config, hyperparam) == expected


def test_tune_ties_go_to_first_domain_value(two_by_two, make_table):
    table = make_table(two_by_two, {"D": [0.7, 0.7, 0.2, 0.2]})
    assert tune(table, "D", ("a1", "b2"), "b") == "b1"


def test_tune_rejects_missing_sweep(two_by_two, make_table):
    table = make_table(two_by_two, {"D": [0.7, np.nan, 0.2, 0.2]})
    with pytest.raises(MissingRows):
        tune(table, "D", ("a1", "b1"), "b")


# --- influence ---


def test_flip_table_has_influence_one_half(flip_table):
    """Starting from (a1,b2) or (a2,b1), tuning a moves the best b."""
    result = influence(flip_table, "D", "a", "b")
    assert (result.difference_count, result.trial_count) == (2, 4)
    assert result.probability == 0.5
    assert brute_force_influence(flip_table, "D", "a", "b") == (2, 4)


def test_constant_table_has_no_influence(two_by_two, make_table):
    table = make_table(two_by_two, {"D": [0.5] * 4})
    assert influence(table, "D", "a", "b").probability == 0.0


def test_singleton_target_domain_has_no_influence():
    space = HyperparamSpace.from_domains({"a": [1, 2, 3], "b": ["only"]})
    table = ResultsTable(space, ("D",), np.array([[0.2], [0.9], [0.4]]))
    result = influence(table, "D", "a", "b")
    assert result.difference_count == 0
    assert result.trial_count == 3


@pytest.mark.parametrize("seed", range(20))
def test_vectorized_influence_matches_loop_oracle(three_space, seed):
    table = generate(random_landscape(three_space, benchmarks=1, seed=seed, noise=0.05))
    for source, target in [("x", "y"), ("y", "x"), ("x", "z"), ("z", "y"), ("y", "z")]:
        result = influence(table, "B1", source, target)
        expected = _loop_influence(table, "B1", source, target)
        assert (result.difference_count, result.trial_count) == expected
        assert brute_force_influence(table, "B1", source, target) == expected


@pytest.mark.parametrize("seed", range(10))
def test_additive_landscapes_have_zero_influence(three_space, seed):
    table = generate(random_landscape(three_space, benchmarks=2, seed=seed, additive_only=True))
    matrix = influence_matrix(table, jobs=1)
    for source in matrix.hyperparams:
        assert matrix.outgoing(source) == 0.0


def test_influence_ignores_monotone_transforms(three_space):
    table = generate(random_landscape(three_space, seed=4, noise=0.05))
    cubed = table.map_accuracies(lambda a: a**3)
    for source, target in [("x", "y"), ("y", "z"), ("z", "x")]:
        assert influence(table, "B1", source, target) == influence(cubed, "B1", source, target)


@pytest.mark.parametrize("seed", range(5))
def test_matrix_and_tuning_order_ignore_monotone_transforms(three_space, seed):
    table = generate(random_landscape(three_space, benchmarks=2, seed=30 + seed, noise=0.05))
    cubed = table.map_accuracies(lambda a: a**3)
    matrix = influence_matrix(table, jobs=1)
    assert matrix == influence_matrix(cubed, jobs=1)
    assert tuning_order(matrix) == tuning_order(influence_matrix(cubed, jobs=1))


def test_fixed_hyperparams_restrict_the_trials(three_space):
    table = generate(random_landscape(three_space, seed=9, noise=0.05))
    result = influence(table, "B1", "x", "y", fixed={"z": "q"})
    assert result.trial_count == 3 * 4
    assert (result.difference_count, result.trial_count) == brute_force_influence(
        table, "B1", "x", "y", fixed={"z": "q"}
    )
    assert _loop_influence(table, "B1", "x", "y", fixed={"z": "q"}) == (result.difference_count, 12)


def test_influence_argument_errors(flip_table, three_space):
    with pytest.raises(SameHyperparam):
        influence(flip_table, "D", "a", "a")
    with pytest.raises(UnknownHyperparam):
        influence(flip_table, "D", "a", "c")
    table = generate(random_landscape(three_space, seed=1))
    with pytest.raises(SpaceError):
        influence(table, "B1", "x", "y", fixed={"x": 1})


def test_missing_rows_in_scanned_grid(two_by_two, make_table):
    table = make_table(two_by_two, {"D": [0.5, 0.4, np.nan, 0.3]})
    with pytest.raises(MissingRows) as exc_info:
        influence(table, "D", "a", "b")
    assert exc_info.value.missing == 1


# --- influence matrix ---


def test_matrix_pools_by_unweighted_mean(three_space):
    table = generate(random_landscape(three_space, benchmarks=3, seed=2, noise=0.1))
    matrix = influence_matrix(table, jobs=1)
    assert matrix.hyperparams == ["x", "y", "z"]
    for source in matrix.hyperparams:
        for target in matrix.hyperparams:
            if source == target:
                continue
            per_dataset = [matrix.probability(source, target, d) for d in table.datasets]
            assert matrix.probability(source, target) == pytest.approx(np.mean(per_dataset))


def test_matrix_same_for_any_worker_count(three_space):
    table = generate(random_landscape(three_space, benchmarks=2, seed=6, noise=0.1))
    assert influence_matrix(table, jobs=1) == influence_matrix(table, jobs=2)


def test_matrix_subset_is_kept_in_space_order(three_space):
    table = generate(random_landscape(three_space, seed=3))
    matrix = influence_matrix(table, hyperparams=["z", "x"], fixed={"y": 20})
    assert matrix.hyperparams == ["x", "z"]
    assert matrix.matrix["x"]["z"].per_dataset["B1"].trial_count == 6
    square = matrix.square_frame()
    assert list(square.columns) == ["source", "x", "z"]
    assert square.iloc[0]["x"] is None


def test_matrix_rejects_bad_subsets(three_space):
    table = generate(random_landscape(three_space, seed=3))
    with pytest.raises(SpaceError):
        influence_matrix(table, hyperparams=["x"])
    with pytest.raises(SpaceError):
        influence_matrix(table, hyperparams=["x", "x", "y"])
    with pytest.raises(SpaceError):
        influence_matrix(table, hyperparams=["x", "y"], fixed={"y": 20})


def test_matrix_frame_has_mean_and_dataset_rows(flip_table):
    frame = influence_matrix(flip_table).to_frame()
    assert list(frame["dataset"]) == ["mean", "D", "mean", "D"]
    assert frame.iloc[1]["difference_count"] == 2


# --- tuning order ---


def test_tuning_order_by_outgoing_influence():
    matrix = InfluenceMatrix.from_probabilities(
        ["x", "y", "z"],
        {
            ("x", "y"): 0.3,
            ("x", "z"): 0.2,
            ("y", "x"): 0.1,
            ("y", "z"): 0.1,
            ("z", "x"): 0.4,
            ("z", "y"): 0.3,
        },
    )
    assert matrix.outgoing("z") == pytest.approx(0.7)
    assert tuning_order(matrix) == ["z", "x", "y"]


def test_tuning_order_ties_keep_space_order():
    names = ["first", "second", "third"]
    matrix = InfluenceMatrix.from_probabilities(
        names, {(s, t): 0.25 for s in names for t in names if s != t}
    )
    assert tuning_order(matrix) == names


def test_kernel_size_first_on_wide_kernel_influences():
    """Influences shaped like the wide-kernel CNN study: the first-layer kernel size dominates."""
    names = ["kernel_size_l1", "stride_l1", "filters_l1", "filters_l3_5"]
    strongest = {"kernel_size_l1": 0.35, "filters_l3_5": 0.2, "filters_l1": 0.12, "stride_l1": 0.05}
    matrix = InfluenceMatrix.from_probabilities(
        names, {(s, t): strongest[s] for s in names for t in names if s != t}
    )
    assert tuning_order(matrix) == ["kernel_size_l1", "filters_l3_5", "filters_l1", "stride_l1"]
