"""Synthetic results tables with known structure, plus a loop-based influence oracle.

A landscape is a base accuracy per benchmark plus additive per-value effects and
optional pairwise interaction terms, with uniform noise from a counter-based
generator (NumPy Philox keyed by ``SeedSequence([seed, dataset_index])``; the noise
of config ``i`` is the ``i``-th draw). Noise is added before clamping to [0, 1].
"""

from __future__ import annotations

import json
import logging
from itertools import combinations
from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from hp_landscape.core.errors import MissingRows, ParseError, SameHyperparam, SpaceError
from hp_landscape.core.parallel import run_parallel
from hp_landscape.model.results import ResultsTable
from hp_landscape.model.space import HyperparamSpace, enumerate_space

logger = logging.getLogger(__name__)

# Effects drawn by random_landscape are multiples of this step, so additive sums are exact.
EFFECT_STEP = 2.0**-10


class AdditiveEffect(BaseModel):
    """One effect per domain value of ``hyperparam``; ``benchmark`` None applies to all."""

    hyperparam: str
    values: list[float]
    benchmark: Optional[int] = None


class InteractionEffect(BaseModel):
    """A |domain(a)| × |domain(b)| table of interaction terms."""

    a: str
    b: str
    values: list[list[float]]
    benchmark: Optional[int] = None


class LandscapeSpec(BaseModel):
    space: HyperparamSpace
    benchmarks: int = Field(1, ge=1)
    dataset_ids: Optional[list[str]] = None
    base: Union[float, list[float]] = 0.5
    effects: list[AdditiveEffect] = Field(default_factory=list)
    interactions: list[InteractionEffect] = Field(default_factory=list)
    noise: float = Field(0.0, ge=0.0)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def check_shapes(self) -> "LandscapeSpec":
        names = set(self.space.names)
        if isinstance(self.base, list) and len(self.base) != self.benchmarks:
            raise ValueError(f"base has {len(self.base)} value(s) for {self.benchmarks} benchmark(s)")
        if self.dataset_ids is not None:
            if len(self.dataset_ids) != self.benchmarks or len(set(self.dataset_ids)) != self.benchmarks:
                raise ValueError("dataset_ids must hold one unique id per benchmark")
        for effect in self.effects:
            if effect.hyperparam not in names:
                raise ValueError(f"effect on unknown hyperparameter '{effect.hyperparam}'")
            size = len(self.space.domain(effect.hyperparam))
            if len(effect.values) != size:
                raise ValueError(f"effect on '{effect.hyperparam}' needs {size} value(s)")
            self._check_benchmark(effect.benchmark)
        for term in self.interactions:
            if term.a not in names or term.b not in names:
                raise ValueError(f"interaction on unknown hyperparameter(s) '{term.a}', '{term.b}'")
            if term.a == term.b:
                raise ValueError(f"interaction needs two different hyperparameters, got '{term.a}'")
            shape = (len(self.space.domain(term.a)), len(self.space.domain(term.b)))
            if np.shape(term.values) != shape:
                raise ValueError(f"interaction '{term.a}' x '{term.b}' needs shape {shape}")
            self._check_benchmark(term.benchmark)
        return self

    def _check_benchmark(self, benchmark: Optional[int]) -> None:
        if benchmark is not None and not 0 <= benchmark < self.benchmarks:
            raise ValueError(f"benchmark index {benchmark} is outside 0..{self.benchmarks - 1}")

    @property
    def datasets(self) -> list[str]:
        return self.dataset_ids or [f"B{i + 1}" for i in range(self.benchmarks)]

    def base_for(self, benchmark: int) -> float:
        return self.base[benchmark] if isinstance(self.base, list) else self.base


def load_landscape_spec(path: Path) -> LandscapeSpec:
    path = Path(path)
    if not path.exists():
        raise ParseError(path, None, "landscape spec not found")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(path, e.lineno, f"invalid JSON: {e.msg}") from e
    try:
        return LandscapeSpec.model_validate(data)
    except ValidationError as e:
        raise SpaceError(f"{path}: {e}") from e


def noise_draws(seed: int, dataset_index: int, count: int, amplitude: float) -> np.ndarray:
    """The first ``count`` uniform draws in [-amplitude, amplitude] for one dataset."""
    generator = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, dataset_index])))
    return generator.uniform(-amplitude, amplitude, size=count)


def _accuracies(spec: LandscapeSpec, benchmark: int) -> np.ndarray:
    space = spec.space
    digits = space.index_grid()
    values = np.full(space.size, spec.base_for(benchmark), dtype=np.float64)
    for effect in spec.effects:
        if effect.benchmark in (None, benchmark):
            values = values + np.asarray(effect.values)[digits[:, space.position(effect.hyperparam)]]
    for term in spec.interactions:
        if term.benchmark in (None, benchmark):
            table = np.asarray(term.values, dtype=np.float64)
            values = values + table[digits[:, space.position(term.a)], digits[:, space.position(term.b)]]
    if spec.noise > 0:
        values = values + noise_draws(spec.seed, benchmark, space.size, spec.noise)
    return np.clip(values, 0.0, 1.0)


def generate(spec: LandscapeSpec, jobs: Optional[int] = None) -> ResultsTable:
    """A complete results table for the landscape; identical specs give identical tables."""
    columns = run_parallel(lambda d: _accuracies(spec, d), range(spec.benchmarks), jobs)
    logger.info("Generated %d config(s) x %d benchmark(s)", spec.space.size, spec.benchmarks)
    return ResultsTable(spec.space, tuple(spec.datasets), np.stack(columns, axis=1))


def random_landscape(
    space: HyperparamSpace,
    benchmarks: int = 1,
    seed: int = 0,
    interaction_scale: float = 0.2,
    noise: float = 0.0,
    additive_only: bool = False,
) -> LandscapeSpec:
    """A seeded landscape with random effects on the EFFECT_STEP grid.

    Additive effects stay within ±0.4 in total around a base of 0.5, so additive-only
    landscapes never hit the clamp.
    """
    generator = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed])))
    per_hyperparam = int(0.4 / len(space.names) / EFFECT_STEP)
    effects = [
        AdditiveEffect(
            hyperparam=h.name,
            values=(generator.integers(-per_hyperparam, per_hyperparam + 1, size=h.size) * EFFECT_STEP).tolist(),
        )
        for h in space.hyperparams
    ]
    interactions = []
    if not additive_only:
        span = int(interaction_scale / EFFECT_STEP)
        for a, b in combinations(space.hyperparams, 2):
            values = generator.integers(-span, span + 1, size=(a.size, b.size)) * EFFECT_STEP
            interactions.append(InteractionEffect(a=a.name, b=b.name, values=values.tolist()))
    return LandscapeSpec(
        space=space,
        benchmarks=benchmarks,
        base=0.5,
        effects=effects,
        interactions=interactions,
        noise=noise,
        seed=seed,
    )


def brute_force_influence(
    table: ResultsTable,
    dataset: str,
    A: str,
    B: str,
    fixed: Optional[Mapping[str, Any]] = None,
) -> tuple[int, int]:
    """(difference count, trial count) by walking every starting config with plain loops."""
    if A == B:
        raise SameHyperparam(A)
    space = table.space
    fixed = dict(fixed or {})
    names = list(space.names)
    a, b = names.index(A), names.index(B)
    pinned = {names.index(k): space.domain(k)[space.value_index(names.index(k), v)] for k, v in fixed.items()}

    def acc(config: tuple) -> float:
        value = table.accuracy(config, dataset)
        if value is None:
            raise MissingRows(dataset, 1)
        return value

    def tune(config: tuple, position: int) -> Any:
        best_value, best_acc = None, None
        for value in space.hyperparams[position].values:
            candidate = list(config)
            candidate[position] = value
            score = acc(tuple(candidate))
            if best_acc is None or score > best_acc:
                best_value, best_acc = value, score
        return best_value

    trials = differences = 0
    for config in enumerate_space(space):
        if any(config[p] != v for p, v in pinned.items()):
            continue
        b_tuned = tune(config, b)
        moved = list(config)
        moved[a] = tune(config, a)
        b_retuned = tune(tuple(moved), b)
        trials += 1
        if b_tuned != b_retuned:
            differences += 1
    return differences, trials
