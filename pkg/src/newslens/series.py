"""Daily time series over a contiguous date span."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

__all__ = ["DatedSeries", "sliding_mean", "align", "align_lagged"]

_DAY = timedelta(days=1)


@dataclass(frozen=True)
class DatedSeries:
    """One float value per consecutive calendar day, starting at ``start``.

    Values are stored as a read-only float64 array.  There are no holes:
    index ``i`` always holds the value for ``start + i`` days.  Callers
    that have gaps must fill or trim them before constructing a series.
    """

    start: date
    values: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1:
            raise ValueError(f"series values must be 1-d, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("series must contain at least one day")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"series {self.label!r} contains non-finite values")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def end(self) -> date:
        """Date of the last sample (inclusive)."""
        return self.start + (len(self) - 1) * _DAY

    def dates(self) -> list[date]:
        return [self.start + i * _DAY for i in range(len(self))]

    def index_of(self, day: date) -> int:
        off = (day - self.start).days
        if not 0 <= off < len(self):
            raise KeyError(f"{day.isoformat()} outside series span")
        return off

    def value_on(self, day: date) -> float:
        return float(self.values[self.index_of(day)])

    def with_values(self, values: np.ndarray, label: str | None = None) -> "DatedSeries":
        """Same span, new values (used by transforms that preserve dates)."""
        return DatedSeries(self.start, values, self.label if label is None else label)


def sliding_mean(series: DatedSeries, window_days: int) -> DatedSeries:
    """Trailing mean over ``window_days`` days, truncated at the span start.

    Output day d averages the input over [d - window_days + 1, d]
    intersected with the span, so early days use shorter windows and the
    result keeps the input's length and dates.
    """
    if window_days < 1:
        raise ValueError(f"window_days must be >= 1, got {window_days}")
    v = series.values
    if window_days == 1:
        return series.with_values(v.copy())
    n = v.size
    csum = np.concatenate(([0.0], np.cumsum(v)))
    idx = np.arange(n)
    lo = np.maximum(idx - window_days + 1, 0)
    out = (csum[idx + 1] - csum[lo]) / (idx - lo + 1)
    return series.with_values(out)


def align(x: DatedSeries, y: DatedSeries) -> tuple[np.ndarray, np.ndarray]:
    """Value arrays of both series restricted to their common dates."""
    start = max(x.start, y.start)
    end = min(x.end, y.end)
    if start > end:
        return np.empty(0), np.empty(0)
    xi = (start - x.start).days
    yi = (start - y.start).days
    k = (end - start).days + 1
    return x.values[xi : xi + k], y.values[yi : yi + k]


def align_lagged(x: DatedSeries, y: DatedSeries, lag: int) -> tuple[np.ndarray, np.ndarray]:
    """Pairs (x(t), y(t + lag)) for every date t where both sides exist."""
    if lag < 0:
        raise ValueError(f"lag must be >= 0, got {lag}")
    shifted = DatedSeries(y.start - lag * _DAY, y.values, y.label)
    return align(x, shifted)
