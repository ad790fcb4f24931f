"""Multiple-defaults commands: greedy search and leave-one-out validation."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

from hp_landscape.commands.common import (
    FormatOption,
    JobsOption,
    OutputFormat,
    OutputOption,
    SpaceOption,
    domain_errors,
    load_table,
    write_result,
)
from hp_landscape.core.output import atomic_write_text, frame_to_csv, model_to_json
from hp_landscape.services.defaults_search import greedy_defaults, loo_evaluate
from hp_landscape.services.landscape_stats import percentile_table

console = Console(stderr=True)

MaxMOption = typer.Option(None, "--max-m", min=1, help="Cap on the number of defaults (default from settings).")


def defaults_command(
    results: Path = typer.Argument(..., help="Long-format results CSV covering every benchmark."),
    max_m: Optional[int] = MaxMOption,
    trajectory: Optional[Path] = typer.Option(None, "--trajectory", help="Also write the full sequence as JSON."),
    curve: Optional[Path] = typer.Option(None, "--curve", help="Also write the expected-best curve (k, E) as CSV."),
    space: Optional[Path] = SpaceOption,
    jobs: Optional[int] = JobsOption,
    output: Optional[Path] = OutputOption,
    fmt: OutputFormat = FormatOption,
):
    """Greedy multiple defaults: one row per default with its percentile on each benchmark."""
    with domain_errors():
        table = load_table(results, space)
        sequence = greedy_defaults(percentile_table(table), max_m, jobs)

    write_result(sequence.to_frame(), sequence, fmt, output)
    if trajectory is not None:
        atomic_write_text(trajectory, model_to_json(sequence))
    if curve is not None:
        atomic_write_text(curve, frame_to_csv(sequence.curve_frame()))
    if output is not None:
        final = sequence.trajectory[-1] if sequence.trajectory else 0.0
        console.print(f"[green]{sequence.m} default(s), expected best {final:.4f}[/green]")


def loo_command(
    results: Path = typer.Argument(..., help="Long-format results CSV covering every benchmark."),
    max_m: Optional[int] = MaxMOption,
    space: Optional[Path] = SpaceOption,
    jobs: Optional[int] = JobsOption,
    output: Optional[Path] = OutputOption,
    fmt: OutputFormat = FormatOption,
):
    """Leave-one-out: defaults picked without a benchmark, scored on it."""
    with domain_errors():
        table = load_table(results, space)
        report = loo_evaluate(percentile_table(table), max_m, jobs)
    write_result(report.to_frame(), report, fmt, output)
