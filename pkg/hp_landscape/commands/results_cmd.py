"""Commands over one or more results tables: validate, summarize, fivenum, percentile, correlate."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
import typer
from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

from hp_landscape.commands.common import (
    FormatOption,
    JobsOption,
    OutputFormat,
    OutputOption,
    SpaceOption,
    domain_errors,
    err_console,
    load_table,
    write_result,
)
from hp_landscape.core.config import get_settings
from hp_landscape.core.errors import EmptyInput, ParseError, SpaceError
from hp_landscape.model.results import validate_grid
from hp_landscape.model.space import Value, format_value
from hp_landscape.services.landscape_stats import (
    CorrelationMethod,
    FiveNumberSummary,
    cross_version_correlation,
    five_number,
    grouped_five_number,
    percentile_table,
    percentile_transform,
    value_mean_table,
)

console = Console()


def validate_command(
    results: Path = typer.Argument(..., help="Long-format results CSV."),
    space: Optional[Path] = SpaceOption,
    strict: bool = typer.Option(False, "--strict", help="Exit 1 when any config is missing."),
    output: Optional[Path] = OutputOption,
    fmt: Optional[OutputFormat] = typer.Option(None, "--format", help="csv or json (default: table)."),
):
    """Check a results table against its space and report missing configs per dataset."""
    with domain_errors():
        table = load_table(results, space)
        report = validate_grid(table)

    if fmt is None and output is None:
        grid = Table(title=f"{results.name}: {report.total_configs} config(s) per dataset")
        grid.add_column("Dataset", style="cyan")
        grid.add_column("Missing", justify="right")
        grid.add_column("Complete", style="magenta")
        for dataset, missing in report.missing.items():
            grid.add_row(dataset, str(missing), "yes" if missing == 0 else "no")
        console.print(grid)
    else:
        frame = pd.DataFrame(
            {"dataset": list(report.missing), "missing": list(report.missing.values())}
        )
        write_result(frame, report, fmt or OutputFormat.csv, output)

    if strict and not report.complete:
        err_console.print("[red]Error:[/red] results table is incomplete")
        raise typer.Exit(1)


def summarize_command(
    results: Path = typer.Argument(..., help="Long-format results CSV."),
    by: str = typer.Option(..., "--by", help="Hyperparameter to group by."),
    dataset: Optional[list[str]] = typer.Option(None, "--dataset", "-d", help="Dataset id (repeatable; default all)."),
    space: Optional[Path] = SpaceOption,
    output: Optional[Path] = OutputOption,
    fmt: OutputFormat = FormatOption,
):
    """Mean accuracy per value of one hyperparameter, one column per dataset, plus a mean row."""
    with domain_errors():
        table = load_table(results, space)
        summary = value_mean_table(table, by, dataset or None)
    write_result(summary.to_frame(), summary, fmt, output)


class GroupedFiveNumber(BaseModel):
    hyperparam: Optional[str] = None
    dataset: Optional[str] = None
    groups: dict[str, FiveNumberSummary]


def _read_values(path: Path) -> np.ndarray:
    """A one-column accuracy CSV; an optional non-numeric first line is a header."""
    if not path.exists():
        raise ParseError(path, None, "values file not found")
    try:
        frame = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        raise EmptyInput(f"values file {path}") from None
    text = frame[0].str.strip()
    values = pd.to_numeric(text, errors="coerce").to_numpy(dtype=np.float64)
    first_line = 1
    if values.size and np.isnan(values[0]):
        values, text, first_line = values[1:], text.iloc[1:], 2
    bad = ~np.isfinite(values)
    if bad.any():
        first = int(np.argmax(bad))
        raise ParseError(path, first + first_line, f"{text.iloc[first]!r} is not a finite number")
    return values


def fivenum_command(
    results: Optional[Path] = typer.Argument(None, help="Long-format results CSV."),
    dataset: Optional[str] = typer.Option(None, "--dataset", "-d", help="Dataset id within the results."),
    by: Optional[str] = typer.Option(None, "--by", help="One summary per value of this hyperparameter."),
    values: Optional[Path] = typer.Option(None, "--values", help="Plain one-column accuracy CSV instead of results."),
    space: Optional[Path] = SpaceOption,
    output: Optional[Path] = OutputOption,
    fmt: OutputFormat = FormatOption,
):
    """Tukey five-number summary of accuracies (box-plot data)."""
    if (results is None) == (values is None):
        raise typer.BadParameter("give either a results file or --values")
    with domain_errors():
        if values is not None:
            groups = {"all": five_number(_read_values(values))}
        else:
            table = load_table(results, space)
            if dataset is None:
                if len(table.datasets) != 1:
                    raise SpaceError(f"--dataset is required; the table holds {list(table.datasets)}")
                dataset = table.datasets[0]
            if by is None:
                vector = table.dataset_vector(dataset)
                groups = {"all": five_number(vector[~np.isnan(vector)])}
            else:
                groups = {format_value(v): s for v, s in grouped_five_number(table, dataset, by).items()}

    report = GroupedFiveNumber(hyperparam=by, dataset=dataset, groups=groups)
    frame = pd.DataFrame(
        [[key, *summary.as_tuple()] for key, summary in groups.items()],
        columns=[by or "group", "min", "q25", "median", "q75", "max"],
    )
    write_result(frame, report, fmt, output)


class PercentileRow(BaseModel):
    config: list[Value]
    dataset: str
    lower_count: int
    percentile: float


class PercentileReport(BaseModel):
    scored: dict[str, int]
    rows: list[PercentileRow]


def percentile_command(
    results: Path = typer.Argument(..., help="Long-format results CSV."),
    dataset: Optional[str] = typer.Option(None, "--dataset", "-d", help="Only this dataset."),
    space: Optional[Path] = SpaceOption,
    output: Optional[Path] = OutputOption,
    fmt: OutputFormat = FormatOption,
):
    """Percentile of every config among the scored configs of its dataset."""
    with domain_errors():
        table = load_table(results, space)
        percentiles = percentile_transform(table, dataset) if dataset else percentile_table(table)

    report = PercentileReport(
        scored=dict(zip(percentiles.datasets, percentiles.scored)),
        rows=[
            PercentileRow(config=list(config), dataset=d, lower_count=count, percentile=p)
            for config, d, count, p in percentiles.records()
        ],
    )
    write_result(percentiles.to_frame(), report, fmt, output)


def correlate_command(
    tables: list[Path] = typer.Argument(..., help="Results CSVs, one per data version."),
    label: Optional[list[str]] = typer.Option(None, "--label", help="Version label per table (default: file stem)."),
    dataset: Optional[str] = typer.Option(None, "--dataset", "-d", help="Dataset id shared by the tables."),
    method: Optional[str] = typer.Option(
        None, "--method", help="pearson or spearman (default from settings)."
    ),
    space: Optional[Path] = SpaceOption,
    jobs: Optional[int] = JobsOption,
    output: Optional[Path] = OutputOption,
    fmt: OutputFormat = FormatOption,
):
    """Correlation between the same configs' accuracies across data versions."""
    chosen: CorrelationMethod = method or get_settings().correlation_method  # type: ignore[assignment]
    if chosen not in ("pearson", "spearman"):
        raise typer.BadParameter(f"unknown method {chosen!r}", param_hint="--method")
    labels = label or [p.stem for p in tables]
    if len(labels) != len(tables):
        raise typer.BadParameter("give one --label per table", param_hint="--label")
    with domain_errors():
        loaded = [load_table(p, space) for p in tables]
        matrix = cross_version_correlation(loaded, labels, dataset, chosen, jobs)
    for name in matrix.undefined:
        err_console.print(f"[yellow]Warning:[/yellow] '{name}' has constant accuracy; correlation undefined")
    write_result(matrix.to_frame(), matrix, fmt, output)
