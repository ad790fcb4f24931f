"""One-at-a-time tuning commands: influence matrix and tuning order."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import pandas as pd
import typer
from pydantic import BaseModel, ValidationError

from hp_landscape.commands.common import (
    FormatOption,
    JobsOption,
    OutputFormat,
    OutputOption,
    SpaceOption,
    domain_errors,
    load_table,
    parse_assignment,
    write_result,
)
from hp_landscape.core.errors import ParseError
from hp_landscape.services.influence import InfluenceMatrix, influence_matrix, tuning_order

DatasetOption = typer.Option(None, "--dataset", "-d", help="Dataset id (repeatable; default all).")
HyperparamOption = typer.Option(
    None, "--hyperparam", "-p", help="Hyperparameter to include (repeatable; default all)."
)
FixOption = typer.Option(
    None, "--fix", help="Pin a hyperparameter, name=value (repeatable); only the rest is scanned."
)


def _compute_matrix(
    results: Path,
    space: Optional[Path],
    dataset: Optional[list[str]],
    hyperparam: Optional[list[str]],
    fix: Optional[list[str]],
    jobs: Optional[int],
) -> InfluenceMatrix:
    table = load_table(results, space)
    fixed = parse_assignment(table.space, fix)
    return influence_matrix(table, dataset or None, hyperparam or None, fixed, jobs)


def influence_command(
    results: Path = typer.Argument(..., help="Long-format results CSV."),
    dataset: Optional[list[str]] = DatasetOption,
    hyperparam: Optional[list[str]] = HyperparamOption,
    fix: Optional[list[str]] = FixOption,
    square: bool = typer.Option(False, "--square", help="CSV as a source x target matrix of pooled values."),
    space: Optional[Path] = SpaceOption,
    jobs: Optional[int] = JobsOption,
    output: Optional[Path] = OutputOption,
    fmt: OutputFormat = FormatOption,
):
    """Probability that tuning one hyperparameter forces re-tuning another."""
    with domain_errors():
        matrix = _compute_matrix(results, space, dataset, hyperparam, fix, jobs)
    frame = matrix.square_frame() if square else matrix.to_frame()
    write_result(frame, matrix, fmt, output)


class TuningOrder(BaseModel):
    order: list[str]
    outgoing: dict[str, float]


def _load_matrix_json(path: Path) -> InfluenceMatrix:
    if not path.exists():
        raise ParseError(path, None, "influence file not found")
    try:
        return InfluenceMatrix.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ParseError(path, None, f"not an influence matrix: {e}") from e


def order_command(
    source: Path = typer.Argument(..., help="Results CSV, or an influence JSON written by 'influence --format json'."),
    dataset: Optional[list[str]] = DatasetOption,
    hyperparam: Optional[list[str]] = HyperparamOption,
    fix: Optional[list[str]] = FixOption,
    space: Optional[Path] = SpaceOption,
    jobs: Optional[int] = JobsOption,
    output: Optional[Path] = OutputOption,
    fmt: OutputFormat = FormatOption,
):
    """Order to tune hyperparameters one at a time: most influential first."""
    with domain_errors():
        if source.suffix.lower() == ".json":
            matrix = _load_matrix_json(source)
        else:
            matrix = _compute_matrix(source, space, dataset, hyperparam, fix, jobs)
        order = tuning_order(matrix)

    report = TuningOrder(order=order, outgoing={name: matrix.outgoing(name) for name in order})
    frame = pd.DataFrame(
        {
            "rank": range(1, len(order) + 1),
            "hyperparam": order,
            "outgoing_influence": [report.outgoing[name] for name in order],
        }
    )
    write_result(frame, report, fmt, output)
