"""Bounded worker parallelism behind the --jobs option."""

from __future__ import annotations

from typing import Callable, Iterable, Optional, TypeVar

import joblib

from hp_landscape.core.config import get_settings

T = TypeVar("T")
R = TypeVar("R")


def resolve_jobs(jobs: Optional[int]) -> int:
    """Map a --jobs value to joblib's n_jobs (None falls back to settings, then all cores)."""
    if jobs is None:
        jobs = get_settings().jobs
    if jobs is None or jobs <= 0:
        return -1
    return jobs


def run_parallel(func: Callable[[T], R], items: Iterable[T], jobs: Optional[int] = None) -> list[R]:
    """Apply ``func`` to every item; results come back in item order whatever the worker count."""
    items = list(items)
    n_jobs = resolve_jobs(jobs)
    if n_jobs == 1 or len(items) <= 1:
        return [func(item) for item in items]
    return joblib.Parallel(n_jobs=n_jobs, prefer="threads")(
        joblib.delayed(func)(item) for item in items
    )
