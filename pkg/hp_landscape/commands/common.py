"""Shared option types, loaders and error handling for the commands."""

from __future__ import annotations

import logging
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Iterator, Optional

import pandas as pd
import typer
from pydantic import BaseModel
from rich.console import Console
from rich.markup import escape

from hp_landscape.core.errors import HpLandscapeError, SpaceError
from hp_landscape.core.output import emit, frame_to_csv, model_to_json
from hp_landscape.model.results import ResultsTable, load_results
from hp_landscape.model.space import HyperparamSpace, load_space

logger = logging.getLogger(__name__)

err_console = Console(stderr=True)

SPACE_SUFFIX = ".space.json"


class OutputFormat(str, Enum):
    csv = "csv"
    json = "json"


SpaceOption = typer.Option(
    None,
    "--space",
    help="Hyperparameter space JSON (default: <results>.space.json next to the results file).",
)
OutputOption = typer.Option(None, "--output", "-o", help="Write to this file instead of stdout.")
FormatOption = typer.Option(OutputFormat.csv, "--format", help="Output format.")
JobsOption = typer.Option(None, "--jobs", "-j", help="Worker count (default: all cores).")


@contextmanager
def domain_errors() -> Iterator[None]:
    """Turn domain errors into a red stderr message and exit code 1."""
    try:
        yield
    except HpLandscapeError as e:
        logger.debug("Command failed", exc_info=True)
        err_console.print(f"[red]Error:[/red] {escape(str(e))}", highlight=False, soft_wrap=True)
        raise typer.Exit(1) from e


def space_path_for(results: Path) -> Path:
    name = results.name
    stem = name[: -len(".csv")] if name.lower().endswith(".csv") else name
    return results.with_name(stem + SPACE_SUFFIX)


def resolve_space(results: Path, space: Optional[Path]) -> HyperparamSpace:
    path = space if space is not None else space_path_for(results)
    if space is None and not path.exists():
        raise SpaceError(f"no --space given and {path} does not exist")
    return load_space(path)


def load_table(results: Path, space: Optional[Path]) -> ResultsTable:
    return load_results(results, resolve_space(results, space))


def parse_assignment(space: HyperparamSpace, pairs: Optional[list[str]]) -> dict[str, object]:
    """``["name=value", ...]`` into ``{name: domain value}``."""
    fixed: dict[str, object] = {}
    for pair in pairs or []:
        name, sep, text = pair.partition("=")
        if not sep:
            raise SpaceError(f"--fix expects name=value, got {pair!r}")
        name = name.strip()
        position = space.position(name)
        fixed[name] = space.hyperparams[position].values[space.value_index(position, text.strip())]
    return fixed


def write_result(
    frame: pd.DataFrame,
    model: BaseModel,
    fmt: OutputFormat,
    output: Optional[Path],
) -> None:
    """Emit ``frame`` as CSV or ``model`` as JSON."""
    text = frame_to_csv(frame) if fmt == OutputFormat.csv else model_to_json(model)
    emit(text, output)
