"""Discrete spectra, peak-weight extraction and engine comparison.

All signals produced by the simulator are bin aligned by construction, so
no window function is applied; a requested peak frequency that misses its
bin by more than a billionth of the resolution triggers a warning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping, TYPE_CHECKING

import numpy as np

from .errors import ConfigurationError

if TYPE_CHECKING:
    from .classical import TimeSeries
    from .quantum import WeightTable


@dataclass(frozen=True)
class Spectrum:
    """One-sided spectrum on uniform bins from 0 Hz to Nyquist."""

    frequencies: np.ndarray
    values: np.ndarray
    resolution: float

    def __post_init__(self):
        if self.frequencies.shape != self.values.shape:
            raise ConfigurationError("frequency and value arrays differ in length")
        if self.values.size and float(self.values.min()) < 0.0:
            raise ConfigurationError("spectrum values must be nonnegative")

    @property
    def nyquist(self) -> float:
        return float(self.frequencies[-1])


@dataclass(frozen=True)
class ComparisonEntry:
    quantum: float
    classical: float
    deviation: float


@dataclass(frozen=True)
class ComparisonReport:
    """Per-mirror normalized weights from both engines and their deviations."""

    per_mirror: dict[str, ComparisonEntry]
    max_deviation: float


def power_spectrum(series: "TimeSeries") -> Spectrum:
    """One-sided, Parseval-normalized power spectrum of a real signal.

    Normalization satisfies ``sum_f P(f) df == sum_t x(t)**2 dt``; the
    doubled interior bins account for the folded negative frequencies.
    """
    samples = np.asarray(series.samples, dtype=float)
    n = samples.size
    if n == 0:
        raise ConfigurationError("cannot take the spectrum of an empty series")
    dt = 1.0 / series.sample_rate
    transform = np.fft.rfft(samples) * dt
    power = np.abs(transform) ** 2
    factors = np.full(power.size, 2.0)
    factors[0] = 1.0
    if n % 2 == 0:
        factors[-1] = 1.0
    resolution = series.sample_rate / n
    return Spectrum(np.fft.rfftfreq(n, dt), power * factors, resolution)


def extract_peak_weights(
    spectrum: Spectrum,
    mirror_freqs: Mapping[str, float],
    window: int = 1,
) -> "WeightTable":
    """Integrate the spectrum around each mirror frequency.

    The weight is the sum of bins within ``window`` bins of the mirror's
    frequency, times the bin width.  The 0 Hz carrier bin is never
    included.  Frequencies at or above Nyquist are rejected.
    """
    from .quantum import WeightTable

    if window < 0:
        raise ConfigurationError(f"window must be nonnegative, got {window}")
    df = spectrum.resolution
    nyquist = spectrum.nyquist
    entries: dict[str, float] = {}
    for label, freq in mirror_freqs.items():
        if freq >= nyquist:
            raise ConfigurationError(
                f"mirror {label} frequency {freq!r} at or above Nyquist {nyquist!r}"
            )
        k = int(round(freq / df))
        if abs(freq - k * df) > 1e-9 * df:
            warnings.warn(
                f"mirror {label} frequency {freq!r} is off-bin "
                f"(resolution {df!r}); its peak leaks into neighbours",
                stacklevel=2,
            )
        lo = max(1, k - window)
        hi = min(spectrum.values.size - 1, k + window)
        weight = float(spectrum.values[lo : hi + 1].sum()) * df if hi >= lo else 0.0
        entries[label] = weight
    return WeightTable(entries, 0.0)


def _normalized(entries: Mapping[str, float]) -> dict[str, float]:
    total = sum(entries.values())
    if total <= 0.0:
        return {k: 0.0 for k in entries}
    return {k: v / total for k, v in entries.items()}


def compare_weights(q: "WeightTable", c: "WeightTable") -> ComparisonReport:
    """Compare two weight tables after normalizing each to unit sum.

    The engines produce quantities with different physical dimensions, so
    only relative weights are comparable; an all-zero table normalizes to
    all zeros.  Scaling either table leaves the report unchanged.
    """
    if set(q.entries) != set(c.entries):
        raise ConfigurationError(
            f"mismatched mirror label sets: {sorted(q.entries)} vs {sorted(c.entries)}"
        )
    qn = _normalized(q.entries)
    cn = _normalized(c.entries)
    per = {
        label: ComparisonEntry(qn[label], cn[label], abs(qn[label] - cn[label]))
        for label in sorted(qn)
    }
    max_dev = max((e.deviation for e in per.values()), default=0.0)
    return ComparisonReport(per, max_dev)
