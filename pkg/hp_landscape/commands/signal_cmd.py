"""Dataset-variant commands: window, resample, filter, split."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, Optional

import typer
from rich.console import Console

from hp_landscape.commands.common import domain_errors
from hp_landscape.core.config import get_settings
from hp_landscape.core.output import emit, frame_to_csv
from hp_landscape.services import signal_ops
from hp_landscape.services.signal_io import (
    read_signal,
    read_window_set,
    signal_csv_text,
    window_set_frame,
    write_signal,
    write_window_set,
)
from hp_landscape.services.signal_ops import Signal, WindowSet

logger = logging.getLogger(__name__)
console = Console(stderr=True)

RateOption = typer.Option(None, "--rate", "-r", help="Sampling rate in Hz (required for CSV signals).")
WindowsOption = typer.Option(False, "--windows", help="Input is a window-set CSV; each window is processed on its own.")


def _emit_signal(signal: Signal, output: Optional[Path]) -> None:
    if output is None:
        emit(signal_csv_text(signal), None)
    else:
        write_signal(signal, output)


def _emit_windows(windows: WindowSet, output: Optional[Path]) -> None:
    if output is None:
        emit(frame_to_csv(window_set_frame(windows)), None)
    else:
        write_window_set(windows, output)


def _variant_path(directory: Path, source: Path, tag: str) -> Path:
    return directory / f"{source.stem}_{tag}{source.suffix or '.csv'}"


def _apply(
    source: Path,
    rate: Optional[float],
    windows: bool,
    on_signal: Callable[[Signal], Signal],
    on_windows: Callable[[WindowSet], WindowSet],
    output: Optional[Path],
) -> None:
    if windows:
        _emit_windows(on_windows(read_window_set(source, rate)), output)
    else:
        _emit_signal(on_signal(read_signal(source, rate)), output)


def window_command(
    source: Path = typer.Argument(..., help="Signal file (.csv one sample per line, or .bin container)."),
    length: Optional[int] = typer.Option(None, "--length", "-n", min=1, help="Samples per window (default from settings)."),
    label: Optional[str] = typer.Option(None, "--label", help="Class label given to every window."),
    for_resampling: bool = typer.Option(
        False, "--for-resampling", help="Default to the larger pre-resampling window length."
    ),
    rate: Optional[float] = RateOption,
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Window-set CSV (default stdout)."),
):
    """Cut a signal into consecutive non-overlapping windows."""
    with domain_errors():
        signal = read_signal(source, rate)
        settings = get_settings()
        default_length = settings.resample_window_length if for_resampling else settings.window_length
        windows = signal_ops.window(signal, length or default_length, label)
        _emit_windows(windows, output)
    if output is not None:
        console.print(f"[green]{len(windows)} window(s) of {windows.length} sample(s) -> {output}[/green]")


def resample_command(
    source: Path = typer.Argument(..., help="Signal file, or window-set CSV with --windows."),
    factor: Optional[int] = typer.Option(None, "--factor", "-f", min=2, help="Integer decimation factor."),
    ladder: bool = typer.Option(False, "--ladder", help="Write every factor from settings into the --output directory."),
    rate: Optional[float] = RateOption,
    windows: bool = WindowsOption,
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Output file, or directory with --ladder."),
):
    """Anti-aliased integer-factor resampling."""
    if ladder == (factor is not None):
        raise typer.BadParameter("give exactly one of --factor and --ladder")
    if ladder and output is None:
        raise typer.BadParameter("--ladder needs an --output directory", param_hint="--output")
    factors = get_settings().resample_factors if ladder else [factor]
    with domain_errors():
        for f in factors:
            target = _variant_path(output, source, f"x{f}") if ladder else output
            _apply(
                source,
                rate,
                windows,
                lambda s: signal_ops.resample(s, f),
                lambda w: signal_ops.resample_windows(w, f),
                target,
            )
            logger.info("Resampled %s by %d", source, f)


def filter_command(
    source: Path = typer.Argument(..., help="Signal file, or window-set CSV with --windows."),
    cutoff: Optional[float] = typer.Option(None, "--cutoff", "-c", help="Lowpass cutoff in Hz."),
    ladder: bool = typer.Option(False, "--ladder", help="Write every cutoff from settings into the --output directory."),
    rate: Optional[float] = RateOption,
    windows: bool = WindowsOption,
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Output file, or directory with --ladder."),
):
    """Zero-phase lowpass filtering; keeps the rate and the length."""
    if ladder == (cutoff is not None):
        raise typer.BadParameter("give exactly one of --cutoff and --ladder")
    if ladder and output is None:
        raise typer.BadParameter("--ladder needs an --output directory", param_hint="--output")
    cutoffs = get_settings().filter_cutoffs_hz if ladder else [cutoff]
    with domain_errors():
        for c in cutoffs:
            target = _variant_path(output, source, f"lp{c:g}") if ladder else output
            _apply(
                source,
                rate,
                windows,
                lambda s: signal_ops.lowpass(s, c),
                lambda w: signal_ops.lowpass_windows(w, c),
                target,
            )
            logger.info("Filtered %s at %s Hz", source, c)


def split_command(
    source: Path = typer.Argument(..., help="Labeled window-set CSV."),
    train: Path = typer.Option(..., "--train", help="Train window-set CSV."),
    test: Path = typer.Option(..., "--test", help="Test window-set CSV."),
    train_fraction: Optional[float] = typer.Option(
        None, "--train-fraction", help="Fraction per class that goes to train (default from settings)."
    ),
    seed: int = typer.Option(0, "--seed", min=0, help="Seed of the shuffle."),
):
    """Seeded stratified train/test split."""
    if train_fraction is not None and not 0 < train_fraction < 1:
        raise typer.BadParameter("must lie strictly between 0 and 1", param_hint="--train-fraction")
    with domain_errors():
        windows = read_window_set(source)
        train_set, test_set = signal_ops.split(windows, train_fraction, seed)
        write_window_set(train_set, train)
        write_window_set(test_set, test)
    console.print(f"[green]{len(train_set)} train / {len(test_set)} test window(s)[/green]")

