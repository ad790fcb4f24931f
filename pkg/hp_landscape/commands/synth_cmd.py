"""Synthetic results tables for checking the analyses against known landscapes."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

from hp_landscape.commands.common import JobsOption, domain_errors, space_path_for
from hp_landscape.model.results import write_results
from hp_landscape.model.space import load_space, write_space
from hp_landscape.services.synthetic_oracle import generate, load_landscape_spec, random_landscape

console = Console(stderr=True)


def synth_command(
    spec: Optional[Path] = typer.Argument(None, help="Landscape spec JSON (omit with --random)."),
    output: Path = typer.Option(..., "--output", "-o", help="Results CSV; the space JSON is written next to it."),
    random: bool = typer.Option(False, "--random", help="Draw a random landscape over --space instead of reading a spec."),
    space: Optional[Path] = typer.Option(None, "--space", help="Space JSON for --random."),
    benchmarks: int = typer.Option(1, "--benchmarks", min=1, help="Benchmark count for --random."),
    seed: int = typer.Option(0, "--seed", min=0, help="Seed for --random effects and noise."),
    noise: float = typer.Option(0.0, "--noise", min=0.0, help="Uniform noise amplitude for --random."),
    interaction_scale: float = typer.Option(0.2, "--interaction-scale", min=0.0, help="Interaction amplitude for --random."),
    additive_only: bool = typer.Option(False, "--additive-only", help="No interaction terms with --random."),
    jobs: Optional[int] = JobsOption,
):
    """Generate a results table (and its space file) from a landscape spec."""
    if random == (spec is not None):
        raise typer.BadParameter("give either a spec file or --random")
    if random and space is None:
        raise typer.BadParameter("--random needs --space", param_hint="--space")
    with domain_errors():
        if random:
            landscape = random_landscape(
                load_space(space),
                benchmarks=benchmarks,
                seed=seed,
                interaction_scale=interaction_scale,
                noise=noise,
                additive_only=additive_only,
            )
        else:
            landscape = load_landscape_spec(spec)
        table = generate(landscape, jobs)
        write_results(table, output)
        write_space(table.space, space_path_for(output))
    console.print(
        f"[green]{table.entry_count} result(s) -> {output} (space: {space_path_for(output)})[/green]"
    )
