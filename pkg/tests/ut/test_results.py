"""Unit tests for loading, validating and writing results tables."""

import numpy as np
import pytest

from hp_landscape.core.errors import DomainError, DuplicateError, ParseError, RangeError, UnknownDataset
from hp_landscape.model.results import ResultsTable, load_results, validate_grid, write_results
from hp_landscape.model.space import HyperparamSpace, load_space

HEADER = "kernel_size_l1,filters_l1,dataset,accuracy\n"


@pytest.fixture
def space(fixtures_dir):
    return load_space(fixtures_dir / "small_results.space.json")


def _write(tmp_path, body: str, header: str = HEADER):
    path = tmp_path / "results.csv"
    path.write_text(header + body, encoding="utf-8")
    return path


# --- loading ---


def test_load_fixture(small_results, space):
    """The fixture has four configs on two datasets, all present."""
    table = load_results(small_results, space)
    assert table.datasets == ("CWRU", "SEU")
    assert table.entry_count == 8
    assert table.is_complete
    assert table.accuracy((256, 16), "CWRU") == pytest.approx(0.95)
    assert table.accuracy((16, 16), "SEU") == pytest.approx(0.7)


def test_load_tolerates_reordered_columns_and_whitespace(tmp_path, space):
    path = _write(tmp_path, "CWRU, 0.5 ,16,8\n", header="dataset,accuracy,kernel_size_l1,filters_l1\n")
    table = load_results(path, space)
    assert table.accuracy((16, 8), "CWRU") == 0.5
    assert table.entry_count == 1


def test_unknown_domain_value_reports_line(tmp_path, space):
    path = _write(tmp_path, "16,8,CWRU,0.5\n32,8,CWRU,0.5\n")
    with pytest.raises(DomainError) as exc_info:
        load_results(path, space)
    assert exc_info.value.hyperparam == "kernel_size_l1"
    assert exc_info.value.line == 3


def test_duplicate_config_dataset_pair(tmp_path, space):
    path = _write(tmp_path, "16,8,CWRU,0.5\n16,8,SEU,0.5\n16,8,CWRU,0.6\n")
    with pytest.raises(DuplicateError) as exc_info:
        load_results(path, space)
    assert exc_info.value.config == (16, 8)
    assert exc_info.value.dataset == "CWRU"
    assert exc_info.value.line == 4


@pytest.mark.parametrize("value", ["1.5", "-0.1", "inf", "nan"])
def test_accuracy_out_of_range(tmp_path, space, value):
    path = _write(tmp_path, f"16,8,CWRU,{value}\n")
    with pytest.raises(RangeError) as exc_info:
        load_results(path, space)
    assert exc_info.value.line == 2


@pytest.mark.parametrize(
    "header,body",
    [
        ("kernel_size_l1,dataset,accuracy\n", "16,CWRU,0.5\n"),
        (HEADER, "16,8,CWRU\n"),
        (HEADER, "16,8,CWRU,high\n"),
        (HEADER, "16,8,,0.5\n"),
    ],
)
def test_malformed_files_raise_parse_error(tmp_path, space, header, body):
    path = _write(tmp_path, body, header=header)
    with pytest.raises(ParseError):
        load_results(path, space)


def test_empty_and_missing_files(tmp_path, space):
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="utf-8")
    with pytest.raises(ParseError) as exc_info:
        load_results(empty, space)
    assert exc_info.value.line == 1
    with pytest.raises(ParseError):
        load_results(tmp_path / "absent.csv", space)


# --- table model ---


def test_validate_grid_counts_missing_configs(tmp_path, space):
    path = _write(tmp_path, "16,8,CWRU,0.5\n16,16,CWRU,0.5\n16,8,SEU,0.5\n")
    report = validate_grid(load_results(path, space))
    assert report.total_configs == 4
    assert report.missing == {"CWRU": 2, "SEU": 3}
    assert not report.complete


def test_table_rejects_out_of_range_values(two_by_two):
    with pytest.raises(RangeError):
        ResultsTable(two_by_two, ("D",), np.array([[0.5], [0.5], [1.2], [0.5]]))


def test_table_is_read_only(flip_table):
    with pytest.raises(ValueError):
        flip_table.accuracies[0, 0] = 0.3


def test_grid_shape_and_unknown_dataset(flip_table):
    grid = flip_table.grid("D")
    assert grid.shape == (2, 2)
    assert grid[1, 1] == 0.95
    with pytest.raises(UnknownDataset):
        flip_table.dataset_vector("E")


def test_from_rows_and_subset(two_by_two):
    table = ResultsTable.from_rows(two_by_two, {(("a1", "b1"), "X"): 0.4, (("a2", "b2"), "Y"): 0.6})
    assert table.datasets == ("X", "Y")
    assert table.entry_count == 2
    assert table.subset_datasets(["Y"]).accuracy(("a2", "b2"), "Y") == 0.6


def test_write_then_load_preserves_entries(tmp_path, small_results, space):
    table = load_results(small_results, space)
    out = tmp_path / "copy.csv"
    write_results(table, out)
    again = load_results(out, space)
    assert again.datasets == table.datasets
    np.testing.assert_array_equal(again.accuracies, table.accuracies)


def test_write_then_load_keeps_dataset_order_of_partial_table(tmp_path):
    space = HyperparamSpace.from_domains({"a": [1, 2]})
    table = ResultsTable(space, ("A", "B"), np.array([[np.nan, 0.5], [0.3, 0.6]]))
    out = tmp_path / "partial.csv"
    write_results(table, out)
    again = load_results(out, space)
    assert again.datasets == ("A", "B")
    np.testing.assert_array_equal(again.accuracies, table.accuracies)
    assert out.read_text(encoding="utf-8").splitlines() == [
        "a,dataset,accuracy",
        "2,A,0.3",
        "1,B,0.5",
        "2,B,0.6",
    ]


def test_write_skips_missing_entries(tmp_path):
    space = HyperparamSpace.from_domains({"lr": [0.1, 0.01]})
    table = ResultsTable(space, ("D",), np.array([[0.25], [np.nan]]))
    out = tmp_path / "out.csv"
    write_results(table, out)
    assert out.read_text(encoding="utf-8").splitlines() == ["lr,dataset,accuracy", "0.1,D,0.25"]
