"""Main CLI entry point for hp-landscape."""

import logging
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

from hp_landscape import __version__
from hp_landscape.commands import defaults_cmd, results_cmd, signal_cmd, synth_cmd, tuning_cmd
from hp_landscape.core.config import get_config_info, set_config_file, setup_logging

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="hp_landscape",
    help="Analyse grid-search results across benchmarks and build vibration dataset variants.",
    no_args_is_help=True,
)

console = Console()

# Results tables
app.command(name="validate")(results_cmd.validate_command)
app.command(name="summarize")(results_cmd.summarize_command)
app.command(name="fivenum")(results_cmd.fivenum_command)
app.command(name="percentile")(results_cmd.percentile_command)
app.command(name="correlate")(results_cmd.correlate_command)

# One-at-a-time tuning
app.command(name="influence")(tuning_cmd.influence_command)
app.command(name="order")(tuning_cmd.order_command)

# Multiple defaults
app.command(name="defaults")(defaults_cmd.defaults_command)
app.command(name="loo")(defaults_cmd.loo_command)

# Dataset variants
app.command(name="window")(signal_cmd.window_command)
app.command(name="resample")(signal_cmd.resample_command)
app.command(name="filter")(signal_cmd.filter_command)
app.command(name="split")(signal_cmd.split_command)

# Synthetic landscapes
app.command(name="synth")(synth_cmd.synth_command)


def _version_callback(value: bool) -> None:
    if value:
        console.print(f"hp_landscape {__version__}")
        raise typer.Exit()


@app.callback()
def main_callback(
    config: Optional[Path] = typer.Option(
        None, "--config", exists=True, dir_okay=False, help="YAML file overriding the packaged defaults."
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr."),
    version: bool = typer.Option(
        False, "--version", callback=_version_callback, is_eager=True, help="Show the version and exit."
    ),
):
    """hp-landscape - grid-search landscape analysis and vibration dataset variants."""
    set_config_file(config)
    setup_logging("DEBUG" if verbose else None)
    logger.debug("Configuration: %s", get_config_info())


if __name__ == "__main__":
    app()
