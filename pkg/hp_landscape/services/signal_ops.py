"""Dataset variants from raw vibration signals.

Windowing, integer-factor decimation behind a Kaiser-window FIR, zero-phase
Butterworth lowpass filtering and seeded stratified train/test splits.

Window-size conventions for reproducing the variant experiments:

* resampling: cut the recording into ``resample_window_length`` windows first, then
  resample each window (inputs shrink with the factor);
* filtering: filter the recording, then cut ``window_length`` windows (filtering keeps
  the rate and the window size).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import signal as sps

from hp_landscape.core.config import get_settings
from hp_landscape.core.errors import (
    ClassTooSmall,
    CutoffOutOfRange,
    InvalidSignal,
    SignalTooShort,
    UnlabeledWindows,
)

logger = logging.getLogger(__name__)

# Butterworth settling time, in cutoff periods, taken as the IIR "filter length".
_SETTLING_PERIODS = 12


@dataclass(frozen=True)
class Signal:
    """A single-channel recording; samples are read-only float64."""

    samples: np.ndarray
    rate: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise InvalidSignal(f"sampling rate must be positive, got {self.rate}")
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise InvalidSignal(f"expected a 1-D sample array, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise InvalidSignal(f"sample {int(np.argmax(~np.isfinite(samples)))} is not finite")
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "rate", float(self.rate))

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def nyquist(self) -> float:
        return self.rate / 2


@dataclass(frozen=True)
class WindowSet:
    """Equal-length windows, optionally labeled; ``rate`` is None when unknown."""

    windows: np.ndarray
    length: int
    rate: Optional[float] = None
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        if self.length < 1:
            raise InvalidSignal(f"window length must be at least 1, got {self.length}")
        windows = np.array(self.windows, dtype=np.float64)
        if windows.size == 0:
            windows = np.zeros((0, self.length))
        if windows.ndim != 2 or windows.shape[1] != self.length:
            raise InvalidSignal(f"windows have shape {windows.shape}, declared length {self.length}")
        if not np.all(np.isfinite(windows)):
            raise InvalidSignal("window samples must be finite")
        if self.rate is not None and not (math.isfinite(self.rate) and self.rate > 0):
            raise InvalidSignal(f"sampling rate must be positive, got {self.rate}")
        if self.labels is not None and len(self.labels) != windows.shape[0]:
            raise InvalidSignal(f"{len(self.labels)} label(s) for {windows.shape[0]} window(s)")
        windows.flags.writeable = False
        object.__setattr__(self, "windows", windows)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(str(label) for label in self.labels))

    def __len__(self) -> int:
        return int(self.windows.shape[0])

    def take(self, indices: Sequence[int]) -> "WindowSet":
        indices = list(indices)
        labels = tuple(self.labels[i] for i in indices) if self.labels is not None else None
        return WindowSet(self.windows[indices], self.length, self.rate, labels)

    def require_rate(self) -> float:
        if self.rate is None:
            raise InvalidSignal("the window set has no sampling rate; pass one explicitly")
        return self.rate


def window(signal: Signal, length: int, label: Optional[str] = None) -> WindowSet:
    """Consecutive non-overlapping windows; a trailing remainder shorter than ``length`` is dropped."""
    if length < 1:
        raise InvalidSignal(f"window length must be at least 1, got {length}")
    count = len(signal) // length
    dropped = len(signal) - count * length
    if dropped:
        logger.debug("Dropping %d trailing sample(s)", dropped)
    windows = signal.samples[: count * length].reshape(count, length)
    labels = (label,) * count if label is not None else None
    return WindowSet(windows, length, signal.rate, labels)


def concatenate(windows: WindowSet) -> Signal:
    """Join the windows back into one signal."""
    return Signal(windows.windows.ravel(), windows.require_rate())


# --- decimation ---


def decimation_filter(factor: int, rate: float = 1.0) -> np.ndarray:
    """Odd-length Kaiser-window lowpass taps for decimating by ``factor``, unit DC gain.

    The transition band spans ``fir_transition_start`` to 1.0 of the new Nyquist
    frequency and the stopband reaches ``fir_stopband_db``.
    """
    settings = get_settings()
    nyquist = rate / 2
    new_nyquist = nyquist / factor
    width = (1.0 - settings.fir_transition_start) * new_nyquist
    numtaps, beta = sps.kaiserord(settings.fir_stopband_db, width / nyquist)
    if numtaps % 2 == 0:
        numtaps += 1
    cutoff = (settings.fir_transition_start + 1.0) / 2 * new_nyquist
    return sps.firwin(numtaps, cutoff, window=("kaiser", beta), fs=rate, scale=True)


def _decimate_rows(rows: np.ndarray, factor: int, taps: np.ndarray) -> np.ndarray:
    """Filter each row with ``taps`` (odd reflection at both ends, zero delay) and keep every factor-th sample."""
    n = rows.shape[1]
    pad = taps.size
    padded = np.pad(rows, ((0, 0), (pad, pad)), mode="reflect", reflect_type="odd")
    filtered = sps.fftconvolve(padded, taps[None, :], mode="same", axes=1)[:, pad : pad + n]
    return np.ascontiguousarray(filtered[:, ::factor][:, : n // factor])


def _check_factor(factor: int) -> None:
    if int(factor) != factor or factor < 2:
        raise InvalidSignal(f"resampling factor must be an integer >= 2, got {factor}")


def resample(signal: Signal, factor: int) -> Signal:
    """Anti-aliased decimation: rate / factor, floor(n / factor) samples.

    Within one filter length of either end the output follows the odd reflection of the
    input; the first output sample equals the first input sample.
    """
    _check_factor(factor)
    taps = decimation_filter(factor, signal.rate)
    if len(signal) < taps.size:
        raise SignalTooShort(len(signal), taps.size)
    samples = _decimate_rows(signal.samples[None, :], factor, taps)[0]
    logger.debug("Resampled %d -> %d samples (factor %d, %d taps)", len(signal), samples.size, factor, taps.size)
    return Signal(samples, signal.rate / factor)


def resample_windows(windows: WindowSet, factor: int) -> WindowSet:
    """Resample every window on its own; labels are kept."""
    _check_factor(factor)
    taps = decimation_filter(factor, windows.rate or 1.0)
    if len(windows) and windows.length < taps.size:
        raise SignalTooShort(windows.length, taps.size)
    rows = _decimate_rows(windows.windows, factor, taps) if len(windows) else np.zeros((0, windows.length // factor))
    rate = windows.rate / factor if windows.rate is not None else None
    return WindowSet(rows, windows.length // factor, rate, windows.labels)


# --- lowpass ---


def _check_cutoff(cutoff: float, rate: float) -> None:
    if not (0 < cutoff < rate / 2):
        raise CutoffOutOfRange(cutoff, rate)


def lowpass_settling_samples(cutoff: float, rate: float) -> int:
    """Samples after which the Butterworth response has settled; used as its filter length."""
    return int(math.ceil(_SETTLING_PERIODS * rate / cutoff))


def steady_state_slice(n: int, filter_length: int) -> slice:
    """The region of an n-sample output that excludes twice the filter length at each end."""
    margin = 2 * filter_length
    return slice(margin, max(margin, n - margin))


def _lowpass_rows(rows: np.ndarray, cutoff: float, rate: float) -> np.ndarray:
    n = rows.shape[-1]
    if n == 0:
        return rows.copy()
    sos = sps.butter(get_settings().lowpass_order, cutoff, btype="low", fs=rate, output="sos")
    padlen = min(lowpass_settling_samples(cutoff, rate), n - 1)
    return sps.sosfiltfilt(sos, rows, axis=-1, padtype="odd", padlen=padlen)


def lowpass(signal: Signal, cutoff: float) -> Signal:
    """Zero-phase Butterworth lowpass; rate and length unchanged."""
    _check_cutoff(cutoff, signal.rate)
    return Signal(_lowpass_rows(signal.samples, cutoff, signal.rate), signal.rate)


def lowpass_windows(windows: WindowSet, cutoff: float) -> WindowSet:
    rate = windows.require_rate()
    _check_cutoff(cutoff, rate)
    rows = _lowpass_rows(windows.windows, cutoff, rate) if len(windows) else windows.windows
    return WindowSet(rows, windows.length, rate, windows.labels)


# --- variants ---


def resampling_ladder(signal: Signal, factors: Optional[Sequence[int]] = None) -> dict[int, Signal]:
    """The signal resampled by every factor of the ladder."""
    factors = list(factors) if factors is not None else get_settings().resample_factors
    return {int(f): resample(signal, int(f)) for f in factors}


def filtering_ladder(signal: Signal, cutoffs: Optional[Sequence[float]] = None) -> dict[float, Signal]:
    """The signal lowpassed at every cutoff of the ladder."""
    cutoffs = list(cutoffs) if cutoffs is not None else get_settings().filter_cutoffs_hz
    return {float(c): lowpass(signal, float(c)) for c in cutoffs}


# --- split ---


def split(windows: WindowSet, train_fraction: Optional[float] = None, seed: int = 0) -> tuple[WindowSet, WindowSet]:
    """Seeded stratified split into (train, test).

    Per class (sorted by label) floor(train_fraction · count) windows go to train, at
    least one; both parts keep the original window order.
    """
    if train_fraction is None:
        train_fraction = get_settings().train_fraction
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must lie strictly between 0 and 1, got {train_fraction}")
    if windows.labels is None:
        raise UnlabeledWindows()

    fraction = Fraction(repr(float(train_fraction)))
    labels = np.array(windows.labels, dtype=object)
    rng = np.random.default_rng(seed)
    train: list[int] = []
    for label in sorted(set(windows.labels)):
        members = np.flatnonzero(labels == label)
        if members.size < 2:
            raise ClassTooSmall(label, int(members.size))
        take = max(1, math.floor(fraction * int(members.size)))
        train.extend(int(i) for i in rng.permutation(members)[:take])
        logger.debug("Class %s: %d of %d window(s) to train", label, take, members.size)

    train_set = set(train)
    train_idx = sorted(train_set)
    test_idx = [i for i in range(len(windows)) if i not in train_set]
    logger.info("Split %d window(s): %d train, %d test", len(windows), len(train_idx), len(test_idx))
    return windows.take(train_idx), windows.take(test_idx)
