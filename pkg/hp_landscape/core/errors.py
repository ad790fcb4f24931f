"""Domain exceptions; the CLI maps every HpLandscapeError to exit code 1."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Optional


class HpLandscapeError(Exception):
    """Base class for validation and domain errors."""


def _at_line(line: Optional[int]) -> str:
    return f" (line {line})" if line is not None else ""


# --- ingestion ---


class ParseError(HpLandscapeError):
    """Raised when an input file cannot be parsed."""

    def __init__(self, path: Path | str, line: Optional[int], reason: str) -> None:
        self.path = str(path)
        self.line = line
        self.reason = reason
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {reason}")


class DomainError(HpLandscapeError):
    """Raised when a value is not a member of its hyperparameter domain."""

    def __init__(self, hyperparam: str, value: Any, line: Optional[int] = None) -> None:
        self.hyperparam = hyperparam
        self.value = value
        self.line = line
        super().__init__(
            f"Value {value!r} is not in the domain of '{hyperparam}'{_at_line(line)}"
        )


class DuplicateError(HpLandscapeError):
    """Raised when a (config, dataset) pair occurs twice."""

    def __init__(self, config: tuple, dataset: str, line: Optional[int] = None) -> None:
        self.config = config
        self.dataset = dataset
        self.line = line
        super().__init__(
            f"Duplicate result for config {config!r} on dataset '{dataset}'{_at_line(line)}"
        )


class RangeError(HpLandscapeError):
    """Raised when an accuracy is not a finite fraction in [0, 1]."""

    def __init__(self, value: Any, line: Optional[int] = None) -> None:
        self.value = value
        self.line = line
        super().__init__(f"Accuracy {value!r} is outside [0, 1]{_at_line(line)}")


class SpaceError(HpLandscapeError):
    """Raised for an invalid hyperparameter space or assignment."""

    def __init__(self, reason: str) -> None:
        self.reason = reason
        super().__init__(reason)


class UnknownHyperparam(HpLandscapeError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Unknown hyperparameter '{name}'")


class UnknownDataset(HpLandscapeError):
    def __init__(self, dataset: str) -> None:
        self.dataset = dataset
        super().__init__(f"Unknown dataset '{dataset}'")


# --- statistics ---


class EmptyInput(HpLandscapeError):
    def __init__(self, what: str = "input") -> None:
        super().__init__(f"Empty {what}")


class TooFewConfigs(HpLandscapeError):
    """Raised when a percentile transform has fewer than two scored configs."""

    def __init__(self, dataset: str, count: int) -> None:
        self.dataset = dataset
        self.count = count
        super().__init__(
            f"Dataset '{dataset}' has {count} scored config(s); at least 2 are required"
        )


class SpaceMismatch(HpLandscapeError):
    def __init__(self, reason: str) -> None:
        self.reason = reason
        super().__init__(f"Tables are not comparable: {reason}")


# --- influence / defaults ---


class MissingRows(HpLandscapeError):
    """Raised when an operation needs accuracies the table does not have."""

    def __init__(self, dataset: str, missing: int) -> None:
        self.dataset = dataset
        self.missing = missing
        super().__init__(
            f"Dataset '{dataset}' is missing {missing} accuracy entr"
            f"{'y' if missing == 1 else 'ies'} in the scanned subspace"
        )


class SameHyperparam(HpLandscapeError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(f"Influence needs two different hyperparameters, got '{name}' twice")


class UnscoredConfig(HpLandscapeError):
    def __init__(self, index: int) -> None:
        self.index = index
        super().__init__(f"Config #{index} has no percentile on every benchmark")


class OutOfRange(HpLandscapeError):
    def __init__(self, k: int, m: int) -> None:
        self.k = k
        self.m = m
        super().__init__(f"k={k} is outside 1..{m}")


class TooFewBenchmarks(HpLandscapeError):
    def __init__(self, count: int) -> None:
        self.count = count
        super().__init__(f"Leave-one-out needs at least 2 benchmarks, got {count}")


# --- signals ---


class InvalidSignal(HpLandscapeError):
    def __init__(self, reason: str) -> None:
        self.reason = reason
        super().__init__(f"Invalid signal: {reason}")


class SignalTooShort(HpLandscapeError):
    def __init__(self, length: int, required: int) -> None:
        self.length = length
        self.required = required
        super().__init__(f"Signal has {length} samples; the filter needs at least {required}")


class CutoffOutOfRange(HpLandscapeError):
    def __init__(self, cutoff: float, rate: float) -> None:
        self.cutoff = cutoff
        self.rate = rate
        super().__init__(
            f"Cutoff {cutoff} Hz must lie strictly between 0 and the Nyquist frequency {rate / 2} Hz"
        )


class UnlabeledWindows(HpLandscapeError):
    def __init__(self) -> None:
        super().__init__("Splitting requires labeled windows")


class ClassTooSmall(HpLandscapeError):
    def __init__(self, label: str, count: int) -> None:
        self.label = label
        self.count = count
        super().__init__(f"Class '{label}' has {count} window(s); at least 2 are required")
