"""Hyperparameter spaces, configurations and grid enumeration."""

from __future__ import annotations

import itertools
import json
from pathlib import Path
from typing import Any, Mapping, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationError, field_validator

from hp_landscape.core.errors import DomainError, ParseError, SpaceError, UnknownHyperparam
from hp_landscape.core.output import atomic_write_text

Value = Union[int, float, str]
# A config is the tuple of its values, positionally aligned with the space.
Config = tuple[Any, ...]


def format_value(value: Any) -> str:
    """Canonical text form of a domain value, used in CSV files and lookups."""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


class Hyperparam(BaseModel):
    """A named hyperparameter with its ordered value domain."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1)
    values: tuple[Value, ...]

    @field_validator("values")
    @classmethod
    def validate_domain(cls, v: tuple[Value, ...]) -> tuple[Value, ...]:
        if not v:
            raise ValueError("domain must not be empty")
        texts = [format_value(x) for x in v]
        if len(set(texts)) != len(texts):
            raise ValueError(f"domain contains duplicates: {list(v)}")
        return v

    @property
    def size(self) -> int:
        return len(self.values)


class HyperparamSpace(BaseModel):
    """Ordered hyperparameters; domain order is the tie-break order everywhere."""

    model_config = ConfigDict(frozen=True)

    hyperparams: tuple[Hyperparam, ...]

    _positions: dict[str, int] = PrivateAttr(default_factory=dict)
    _lookups: list[dict[str, int]] = PrivateAttr(default_factory=list)

    @field_validator("hyperparams")
    @classmethod
    def validate_names(cls, v: tuple[Hyperparam, ...]) -> tuple[Hyperparam, ...]:
        if not v:
            raise ValueError("a space needs at least one hyperparameter")
        names = [h.name for h in v]
        if len(set(names)) != len(names):
            raise ValueError(f"hyperparameter names must be unique: {names}")
        if any(n in ("dataset", "accuracy") for n in names):
            raise ValueError("'dataset' and 'accuracy' are reserved column names")
        return v

    def model_post_init(self, __context: Any) -> None:
        self._positions = {h.name: i for i, h in enumerate(self.hyperparams)}
        self._lookups = [
            {format_value(value): j for j, value in enumerate(h.values)} for h in self.hyperparams
        ]

    @classmethod
    def from_domains(cls, domains: Mapping[str, Sequence[Value]]) -> "HyperparamSpace":
        """Build a space from an ordered ``{name: values}`` mapping."""
        try:
            return cls(
                hyperparams=tuple(Hyperparam(name=k, values=tuple(v)) for k, v in domains.items())
            )
        except ValidationError as e:
            raise SpaceError(str(e)) from e

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(h.name for h in self.hyperparams)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(h.size for h in self.hyperparams)

    @property
    def size(self) -> int:
        """Number of configurations in the full grid."""
        return int(np.prod(self.sizes, dtype=np.int64))

    def position(self, name: str) -> int:
        try:
            return self._positions[name]
        except KeyError:
            raise UnknownHyperparam(name) from None

    def domain(self, name: str) -> tuple[Value, ...]:
        return self.hyperparams[self.position(name)].values

    def value_index(self, position: int, value: Any, line: int | None = None) -> int:
        """Index of ``value`` in the domain at ``position``; raises DomainError when absent."""
        index = self._lookups[position].get(format_value(value))
        if index is None:
            raise DomainError(self.hyperparams[position].name, value, line)
        return index

    def lookup(self, position: int) -> dict[str, int]:
        """Text → domain index mapping for the hyperparameter at ``position``."""
        return self._lookups[position]

    def index_of(self, config: Sequence[Any]) -> int:
        """Stable enumeration index of a config (last hyperparameter varies fastest)."""
        if len(config) != len(self.hyperparams):
            raise SpaceError(
                f"config has {len(config)} values but the space has {len(self.hyperparams)} hyperparameters"
            )
        digits = [self.value_index(i, v) for i, v in enumerate(config)]
        return int(np.ravel_multi_index(digits, self.sizes))

    def config_at(self, index: int) -> Config:
        digits = np.unravel_index(int(index), self.sizes)
        return tuple(h.values[int(d)] for h, d in zip(self.hyperparams, digits))

    def index_grid(self) -> np.ndarray:
        """(N, n) array of domain indices for every config in enumeration order."""
        return np.indices(self.sizes).reshape(len(self.sizes), -1).T

    def assignment(self, fixed: Mapping[str, Any]) -> dict[int, int]:
        """Translate ``{name: value}`` into ``{position: domain index}``."""
        return {self.position(name): self.value_index(self.position(name), value) for name, value in fixed.items()}

    def as_domains(self) -> dict[str, list[Value]]:
        return {h.name: list(h.values) for h in self.hyperparams}


def enumerate_space(space: HyperparamSpace) -> list[Config]:
    """All configs in lexicographic order of domain indices; list position = config index."""
    return list(itertools.product(*(h.values for h in space.hyperparams)))


def load_space(path: Path) -> HyperparamSpace:
    """Read a space file: ``{"hyperparams": [{"name": ..., "values": [...]}, ...]}``."""
    path = Path(path)
    if not path.exists():
        raise ParseError(path, None, "space file not found")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ParseError(path, e.lineno, f"invalid JSON: {e.msg}") from e
    try:
        return HyperparamSpace.model_validate(data)
    except ValidationError as e:
        raise SpaceError(f"{path}: {e}") from e


def space_to_json(space: HyperparamSpace) -> str:
    return space.model_dump_json(indent=2) + "\n"


def write_space(space: HyperparamSpace, path: Path) -> None:
    atomic_write_text(Path(path), space_to_json(space))


# Grid of the wide-kernel CNN: 5·3·6·2·6·2·6 = 12960 configurations.
WIDE_KERNEL_DOMAINS: dict[str, list[int]] = {
    "kernel_size_l1": [16, 32, 64, 128, 256],
    "stride_l1": [4, 8, 16],
    "filters_l1": [8, 16, 32, 64, 128, 256],
    "kernel_size_l2": [3, 6],
    "filters_l2": [8, 16, 32, 64, 128, 256],
    "kernel_size_l3_5": [3, 6],
    "filters_l3_5": [8, 16, 32, 64, 128, 256],
}

# The three hyperparameters searched on resampled and filtered data.
IMPORTANT_HYPERPARAMS: tuple[str, ...] = ("kernel_size_l1", "filters_l1", "filters_l3_5")

BENCHMARKS: tuple[str, ...] = ("CWRU", "Gearbox", "MFPT", "Paderborn", "SEU", "UOC", "XJTU")


def wide_kernel_space() -> HyperparamSpace:
    return HyperparamSpace.from_domains(WIDE_KERNEL_DOMAINS)


def important_subspace() -> HyperparamSpace:
    return HyperparamSpace.from_domains({name: WIDE_KERNEL_DOMAINS[name] for name in IMPORTANT_HYPERPARAMS})
