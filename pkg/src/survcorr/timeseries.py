"""Gap-free weekly series built from a region's reported counts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from survcorr.errors import EmptySeriesError, LengthError, RangeError

DEFAULT_LAG = 5


def min_length_for_lag(lag_max: int) -> int:
    """Shortest series the lag window can be computed on (12 for lag 5)."""
    return 2 * lag_max + 2


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """One region's weekly counts with every week filled in.

    ``start_week`` is the 1-based week of ``values[0]`` in the source table.
    ``differenced`` marks first-differenced series, which may go negative.
    """

    region_index: int
    start_week: int
    values: np.ndarray
    differenced: bool = False

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        return (
            self.region_index == other.region_index
            and self.start_week == other.start_week
            and self.differenced == other.differenced
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def end_week(self) -> int:
        return self.start_week + len(self.values) - 1

    @property
    def weeks(self) -> np.ndarray:
        return np.arange(self.start_week, self.end_week + 1)


def fill_missing(
    raw: Sequence[Optional[float]], region_index: int = 1, start_week: int = 1
) -> TimeSeries:
    """Fill absent weeks from their nearest reported neighbours.

    An interior gap gets ``(p + f) / 2`` where ``p`` and ``f`` are the nearest
    reported values before and after it; every week of a multi-week gap gets
    that same value (no ramp). Leading and trailing gaps copy the nearest
    reported value. Reported values pass through untouched.
    """
    if len(raw) < 2:
        raise LengthError(f"series has {len(raw)} weeks; need at least 2")
    present = [i for i, v in enumerate(raw) if v is not None]
    if not present:
        raise EmptySeriesError(f"region {region_index} has no reported weeks")

    out = np.empty(len(raw), dtype=np.float64)
    first, last = present[0], present[-1]
    out[:first] = raw[first]
    out[last + 1:] = raw[last]
    for a, b in zip(present, present[1:]):
        out[a] = raw[a]
        if b > a + 1:
            out[a + 1:b] = (raw[a] + raw[b]) / 2
    out[last] = raw[last]
    return TimeSeries(region_index, start_week, out)


def slice_weeks(
    ts: TimeSeries, first: int, last: int, lag_max: int = DEFAULT_LAG
) -> TimeSeries:
    """Positions ``first..last`` (1-based, inclusive) of ``ts``.

    The slice must stay long enough for a ``lag_max`` cross-correlation.
    """
    n = len(ts)
    if not 1 <= first <= last <= n:
        raise RangeError(f"week range {first}:{last} outside 1:{n}")
    length = last - first + 1
    need = min_length_for_lag(lag_max)
    if length < need:
        raise LengthError(
            f"week range {first}:{last} has {length} weeks; lag {lag_max} needs {need}"
        )
    return TimeSeries(
        ts.region_index,
        ts.start_week + first - 1,
        ts.values[first - 1:last],
        ts.differenced,
    )


def difference(ts: TimeSeries) -> TimeSeries:
    if len(ts) < 2:
        raise LengthError(f"series has {len(ts)} weeks; differencing needs 2")
    return TimeSeries(ts.region_index, ts.start_week + 1, np.diff(ts.values), True)
