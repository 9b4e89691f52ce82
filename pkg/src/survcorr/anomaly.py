"""EARS-C outbreak alarms, alarm clustering, and alarm overlap between regions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Optional

import numpy as np

from survcorr.errors import DomainError, LengthError, PairingError
from survcorr.timeseries import TimeSeries

DEFAULT_BASELINE = 7
DEFAULT_ALPHA = 0.05
DEFAULT_MAX_GAP = 2
DEFAULT_TOLERANCE = 1


@dataclass(frozen=True)
class AlarmEntry:
    week: int
    observed: float
    mean: float
    sd: float
    threshold: float
    alarm: bool
    c_stat: Optional[float]


@dataclass(frozen=True)
class AlarmSeries:
    region_index: int
    baseline: int
    alpha: float
    entries: tuple[AlarmEntry, ...]
    inflated: bool = True

    @property
    def alarm_weeks(self) -> list[int]:
        return [e.week for e in self.entries if e.alarm]

    @property
    def week_range(self) -> tuple[int, int]:
        if not self.entries:
            return (0, -1)
        return (self.entries[0].week, self.entries[-1].week)


@dataclass(frozen=True)
class AlarmCluster:
    start_week: int
    end_week: int
    alarm_count: int


@dataclass(frozen=True)
class OverlapResult:
    jaccard: float
    matched_a: int
    matched_b: int
    mean_lead: Optional[float]
    pairs: tuple[tuple[int, int], ...] = ()


def ears_c(
    ts: TimeSeries,
    baseline: int = DEFAULT_BASELINE,
    alpha: float = DEFAULT_ALPHA,
    inflate: bool = True,
) -> AlarmSeries:
    """Flag weeks whose count exceeds an upper prediction bound.

    For each week after the first ``baseline`` weeks, the bound is
    ``m + z * s * sqrt(1 + 1/baseline)`` with ``m`` and ``s`` the mean and
    sample standard deviation of the preceding ``baseline`` weeks and ``z``
    the two-sided ``1 - alpha`` normal quantile. ``inflate=False`` drops the
    ``sqrt(1 + 1/baseline)`` factor (plain C1). An alarm needs
    ``observed > threshold``. A flat baseline (``s == 0``) alarms on any rise
    above ``m`` and leaves ``c_stat`` as ``None``.
    """
    if baseline < 2:
        raise DomainError(f"baseline must be at least 2 weeks, got {baseline}")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    values = ts.values
    n = len(values)
    if n <= baseline:
        raise LengthError(f"series of {n} weeks is too short for a {baseline}-week baseline")

    z = NormalDist().inv_cdf(1.0 - alpha / 2.0)
    factor = math.sqrt(1.0 + 1.0 / baseline) if inflate else 1.0
    windows = np.lib.stride_tricks.sliding_window_view(values[:-1], baseline)
    means = windows.mean(axis=1)
    sds = windows.std(axis=1, ddof=1)

    entries = []
    for t in range(baseline, n):
        m = float(means[t - baseline])
        s = float(sds[t - baseline])
        observed = float(values[t])
        if s > 0.0:
            threshold = m + z * s * factor
            c_stat: Optional[float] = (observed - m) / s
        else:
            threshold = m
            c_stat = None
        entries.append(
            AlarmEntry(
                week=ts.start_week + t,
                observed=observed,
                mean=m,
                sd=s,
                threshold=threshold,
                alarm=observed > threshold,
                c_stat=c_stat,
            )
        )
    return AlarmSeries(ts.region_index, baseline, alpha, tuple(entries), inflate)


def cluster_alarms(a: AlarmSeries, max_gap: int = DEFAULT_MAX_GAP) -> list[AlarmCluster]:
    """Group alarms separated by at most ``max_gap`` quiet weeks."""
    if max_gap < 0:
        raise DomainError(f"max_gap must be non-negative, got {max_gap}")
    clusters: list[AlarmCluster] = []
    start = last = None
    count = 0
    for week in a.alarm_weeks:
        if last is not None and week - last <= max_gap + 1:
            last = week
            count += 1
            continue
        if last is not None:
            clusters.append(AlarmCluster(start, last, count))
        start = last = week
        count = 1
    if last is not None:
        clusters.append(AlarmCluster(start, last, count))
    return clusters


def alarm_overlap(
    a: AlarmSeries, b: AlarmSeries, tolerance: int = DEFAULT_TOLERANCE
) -> OverlapResult:
    """Match alarms of ``a`` and ``b`` that fall within ``tolerance`` weeks.

    Candidate pairs are taken closest first (ties by earlier midpoint) and
    each alarm is used at most once, which keeps the result symmetric under
    swapping ``a`` and ``b``. ``mean_lead`` averages ``week_b - week_a``, so
    it is positive when ``a`` alarms first.
    """
    if a.week_range != b.week_range:
        raise PairingError(
            f"alarm series cover different weeks: {a.week_range} vs {b.week_range}"
        )
    if tolerance < 0:
        raise DomainError(f"tolerance must be non-negative, got {tolerance}")
    weeks_a, weeks_b = a.alarm_weeks, b.alarm_weeks
    candidates = sorted(
        (abs(wb - wa), wa + wb, wa, wb)
        for wa in weeks_a
        for wb in weeks_b
        if abs(wb - wa) <= tolerance
    )
    used_a: set[int] = set()
    used_b: set[int] = set()
    pairs = []
    for _, _, wa, wb in candidates:
        if wa in used_a or wb in used_b:
            continue
        used_a.add(wa)
        used_b.add(wb)
        pairs.append((wa, wb))
    pairs.sort()

    matched = len(pairs)
    union = len(weeks_a) + len(weeks_b) - matched
    jaccard = matched / union if union else 0.0
    mean_lead = sum(wb - wa for wa, wb in pairs) / matched if matched else None
    return OverlapResult(jaccard, matched, matched, mean_lead, tuple(pairs))
