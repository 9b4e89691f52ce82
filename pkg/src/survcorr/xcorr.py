"""Lag-windowed sample cross-correlation and the weighted correlation score.

Lag convention: a positive lag ``k`` moves the first series ahead of the
second, so if ``y`` is ``x`` delayed by two weeks the correlation peaks at
``k = +2``. Normalisation follows R's ``ccf``: full-series means, and every
lag divided by ``n`` rather than ``n - k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Union

import numpy as np

from survcorr.errors import DegenerateSeriesError, DomainError, LengthError, PairingError
from survcorr.timeseries import DEFAULT_LAG, TimeSeries, min_length_for_lag

ArrayLike = Union[np.ndarray, TimeSeries, list, tuple]


def lag_weights(lag_max: int = DEFAULT_LAG) -> np.ndarray:
    """``10 / (|k| + 1)`` for ``k = -lag_max..lag_max``."""
    lags = np.arange(-lag_max, lag_max + 1)
    return 10.0 / (np.abs(lags) + 1.0)


@dataclass(frozen=True, eq=False)
class CorrelationVector:
    """Correlations for lags ``-lag_max..lag_max``; ``values[lag_max]`` is lag 0."""

    lag_max: int
    values: np.ndarray
    n: int
    i: int = 0
    j: int = 0

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (2 * self.lag_max + 1,):
            raise LengthError(
                f"expected {2 * self.lag_max + 1} correlations, got {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def lags(self) -> np.ndarray:
        return np.arange(-self.lag_max, self.lag_max + 1)

    def at(self, lag: int) -> float:
        if abs(lag) > self.lag_max:
            raise DomainError(f"lag {lag} outside +/-{self.lag_max}")
        return float(self.values[lag + self.lag_max])

    def peak_lag(self) -> int:
        return int(self.lags[np.argmax(self.values)])


def _as_array(series: ArrayLike) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


def standardize(values: np.ndarray) -> np.ndarray:
    """Centre on the mean and divide by the divide-by-n RMS deviation.

    Constant input is rejected rather than turned into NaNs.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0 or values.max() == values.min():
        raise DegenerateSeriesError("series is constant (zero variance)")
    dev = values - values.mean()
    return dev / math.sqrt(float(np.mean(dev * dev)))


def lagged_correlations(zx: np.ndarray, zy: np.ndarray, lag_max: int) -> np.ndarray:
    """Batch kernel on standardised rows.

    ``zx`` and ``zy`` are ``(P, n)`` arrays of paired standardised series; the
    result is ``(P, 2 * lag_max + 1)``. Each entry is a per-row reduction, so a
    row's result does not depend on what else is in the batch.
    """
    p, n = zx.shape
    out = np.empty((p, 2 * lag_max + 1), dtype=np.float64)
    for k in range(lag_max + 1):
        out[:, lag_max + k] = (zx[:, : n - k] * zy[:, k:]).sum(axis=1) / n
    for k in range(1, lag_max + 1):
        out[:, lag_max - k] = (zy[:, : n - k] * zx[:, k:]).sum(axis=1) / n
    np.clip(out, -1.0, 1.0, out=out)
    return out


def ccf(x: ArrayLike, y: ArrayLike, lag_max: int = DEFAULT_LAG) -> CorrelationVector:
    """Cross-correlation of ``x`` and ``y`` for lags ``-lag_max..lag_max``.

    For ``k >= 0`` the entry is
    ``sum_{t=k+1..n} (x[t-k] - mean x)(y[t] - mean y) / (n * sx * sy)``;
    negative lags swap the roles of ``x`` and ``y``, so
    ``ccf(x, y)[k] == ccf(y, x)[-k]`` exactly.
    """
    if lag_max < 0:
        raise DomainError(f"lag_max must be non-negative, got {lag_max}")
    xv, yv = _as_array(x), _as_array(y)
    if xv.ndim != 1 or yv.ndim != 1 or len(xv) != len(yv):
        raise PairingError(f"series lengths differ: {xv.shape} vs {yv.shape}")
    n = len(xv)
    if n < min_length_for_lag(lag_max):
        raise LengthError(
            f"series of length {n} too short for lag {lag_max}; "
            f"need {min_length_for_lag(lag_max)}"
        )
    zx = standardize(xv)[None, :]
    zy = standardize(yv)[None, :]
    i = x.region_index if isinstance(x, TimeSeries) else 0
    j = y.region_index if isinstance(y, TimeSeries) else 0
    return CorrelationVector(lag_max, lagged_correlations(zx, zy, lag_max)[0], n, i, j)


def significance_threshold(n: float, alpha: float = 0.05) -> float:
    """White-noise band ``z_{1 - alpha/2} / sqrt(n)`` for sample correlations."""
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if n < 2:
        raise LengthError(f"series length must be at least 2, got {n}")
    return NormalDist().inv_cdf(1.0 - alpha / 2.0) / math.sqrt(n)


def weighted_score(cv: Union[CorrelationVector, np.ndarray]) -> float:
    """Weighted sum of the correlations, weight ``10 / (|k| + 1)`` at lag ``k``.

    Plain arrays of odd length are accepted and read as lags centred on 0.
    """
    values = cv.values if isinstance(cv, CorrelationVector) else np.asarray(cv, float)
    if values.ndim != 1 or values.size % 2 != 1:
        raise LengthError(f"correlation vector must have odd length, got {values.shape}")
    return float(weighted_scores(values[None, :], values.size // 2)[0])


def weighted_scores(correlations: np.ndarray, lag_max: int) -> np.ndarray:
    """Row-wise :func:`weighted_score` for a ``(P, 2 * lag_max + 1)`` batch.

    Lags ``+k`` and ``-k`` are added before weighting, so reversing a row
    (swapping the pair) gives a bit-identical score.
    """
    w = lag_weights(lag_max)
    centre = correlations[:, lag_max] * w[lag_max]
    if lag_max == 0:
        return centre
    folded = correlations[:, lag_max + 1:] + correlations[:, lag_max - 1::-1]
    return centre + (folded * w[lag_max + 1:]).sum(axis=1)
