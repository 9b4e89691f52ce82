"""Pairwise weighted correlation scores over every region pair.

Only the upper triangle (``i < j``) is stored; ``get(j, i)`` reads the same
slot as ``get(i, j)``.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from survcorr.errors import (
    DegenerateSeriesError,
    EmptySeriesError,
    InsufficientDataError,
    RangeError,
)
from survcorr.ingest import SurveillanceTable
from survcorr.timeseries import (
    DEFAULT_LAG,
    TimeSeries,
    difference,
    fill_missing,
    slice_weeks,
)
from survcorr.xcorr import lagged_correlations, standardize, weighted_scores

logger = logging.getLogger(__name__)

# Fixed so the work split never depends on the worker count.
PAIR_BLOCK = 2048


@dataclass(frozen=True)
class SkippedPair:
    i: int
    j: int
    reason: str


@dataclass(frozen=True)
class TopKEntry:
    region: int
    label: str
    score: float


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    n_regions: int
    scores: np.ndarray  # condensed upper triangle, NaN where skipped
    lag_max: int
    week_range: tuple[int, int]
    labels: tuple[str, ...]
    skipped_pairs: tuple[SkippedPair, ...] = ()
    differenced: bool = False

    def __post_init__(self) -> None:
        scores = np.array(self.scores, dtype=np.float64)
        expected = self.n_regions * (self.n_regions - 1) // 2
        if scores.shape != (expected,):
            raise ValueError(f"expected {expected} condensed scores, got {scores.shape}")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    def _slot(self, i: int, j: int) -> int:
        n = self.n_regions
        if not (1 <= i <= n and 1 <= j <= n):
            raise RangeError(f"region pair ({i}, {j}) outside 1..{n}")
        if i == j:
            raise RangeError(f"no score for a region with itself ({i})")
        if i > j:
            i, j = j, i
        a, b = i - 1, j - 1
        return a * n - a * (a + 1) // 2 + (b - a - 1)

    def get(self, i: int, j: int) -> Optional[float]:
        """Score for the pair, or ``None`` if the pair was skipped."""
        value = self.scores[self._slot(i, j)]
        return None if math.isnan(value) else float(value)

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """1-based ``(i, j)`` arrays aligned with ``scores``."""
        iu, ju = np.triu_indices(self.n_regions, 1)
        return iu + 1, ju + 1

    @property
    def stored(self) -> np.ndarray:
        return self.scores[~np.isnan(self.scores)]

    def dense(self) -> np.ndarray:
        """Full ``N x N`` matrix; diagonal and skipped pairs are NaN."""
        out = np.full((self.n_regions, self.n_regions), np.nan)
        iu, ju = np.triu_indices(self.n_regions, 1)
        out[iu, ju] = self.scores
        out[ju, iu] = self.scores
        return out


def region_series(
    table: SurveillanceTable,
    week_range: Optional[tuple[int, int]] = None,
    lag_max: int = DEFAULT_LAG,
    prewhiten: bool = False,
) -> list[Optional[TimeSeries]]:
    """Fill each region over the full record, then cut to ``week_range``.

    Regions with no reported counts come back as ``None``.
    """
    first, last = week_range or (1, table.n_weeks)
    out: list[Optional[TimeSeries]] = []
    for region, row in zip(table.regions, table.counts):
        try:
            ts = fill_missing(row, region_index=region.index)
        except EmptySeriesError:
            out.append(None)
            continue
        ts = slice_weeks(ts, first, last, lag_max)
        if prewhiten:
            ts = difference(ts)
        out.append(ts)
    return out


def _score_block(z: np.ndarray, iu: np.ndarray, ju: np.ndarray, lag_max: int) -> np.ndarray:
    return weighted_scores(lagged_correlations(z[iu], z[ju], lag_max), lag_max)


def compute_all(
    table: SurveillanceTable,
    lag_max: int = DEFAULT_LAG,
    week_range: Optional[tuple[int, int]] = None,
    *,
    prewhiten: bool = False,
    workers: int = 1,
) -> ScoreMatrix:
    """Score every region pair over ``week_range`` (1-based, inclusive).

    Pairs involving a constant or unreported series are listed in
    ``skipped_pairs`` instead of being scored. Results are identical for any
    ``workers`` value: the pair set is split into fixed blocks and each score
    is a per-row reduction.
    """
    week_range = week_range or (1, table.n_weeks)
    series = region_series(table, week_range, lag_max, prewhiten)
    n = table.n_regions
    length = len(next((s for s in series if s is not None), []))

    z = np.zeros((n, max(length, 1)))
    reasons: dict[int, str] = {}
    for idx, ts in enumerate(series):
        if ts is None:
            reasons[idx] = "no reported counts"
            continue
        try:
            z[idx] = standardize(ts.values)
        except DegenerateSeriesError:
            reasons[idx] = "constant series"

    if n - len(reasons) < 2:
        raise InsufficientDataError(
            f"only {n - len(reasons)} region(s) with a usable series in weeks "
            f"{week_range[0]}:{week_range[1]}; need 2"
        )

    iu, ju = np.triu_indices(n, 1)
    scores = np.full(len(iu), np.nan)
    usable = np.ones(n, dtype=bool)
    usable[list(reasons)] = False
    keep = np.flatnonzero(usable[iu] & usable[ju])

    blocks = [keep[s:s + PAIR_BLOCK] for s in range(0, len(keep), PAIR_BLOCK)]

    def run(block: np.ndarray) -> np.ndarray:
        return _score_block(z, iu[block], ju[block], lag_max)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(b) for b in blocks]
    for block, result in zip(blocks, results):
        scores[block] = result

    skipped = []
    for slot in np.flatnonzero(~(usable[iu] & usable[ju])):
        a, b = int(iu[slot]), int(ju[slot])
        why = [f"region {r + 1} {reasons[r]}" for r in (a, b) if r in reasons]
        skipped.append(SkippedPair(a + 1, b + 1, "; ".join(why)))
    if skipped:
        logger.info("skipped %d degenerate pairs", len(skipped))

    return ScoreMatrix(
        n_regions=n,
        scores=scores,
        lag_max=lag_max,
        week_range=week_range,
        labels=tuple(r.label for r in table.regions),
        skipped_pairs=tuple(skipped),
        differenced=prewhiten,
    )


def top_k(m: ScoreMatrix, region: int, k: int = 5) -> list[TopKEntry]:
    """The ``k`` best-scoring partners of ``region``, highest first.

    Ties go to the lower partner index. Skipped pairs never appear, so fewer
    than ``k`` entries come back when the region has degenerate partners.
    """
    n = m.n_regions
    if not 1 <= region <= n:
        raise RangeError(f"region {region} outside 1..{n}")
    if not 1 <= k <= n - 1:
        raise RangeError(f"k must lie in 1..{n - 1}, got {k}")
    partners = []
    for j in range(1, n + 1):
        if j == region:
            continue
        score = m.get(region, j)
        if score is not None:
            partners.append((-score, j))
    partners.sort()
    return [TopKEntry(j, m.labels[j - 1], -neg) for neg, j in partners[:k]]


def summary_stats(m: ScoreMatrix | np.ndarray) -> dict[str, float]:
    """Mean, sample SD (0 for a single score), min, median and max."""
    values = m.stored if isinstance(m, ScoreMatrix) else np.asarray(m, dtype=np.float64)
    if values.size == 0:
        raise InsufficientDataError("no stored scores")
    return {
        "mean": float(values.mean()),
        "sd": float(values.std(ddof=1)) if values.size > 1 else 0.0,
        "min": float(values.min()),
        "median": float(np.median(values)),
        "max": float(values.max()),
    }


@dataclass(frozen=True)
class WindowComparison:
    matrix_a: ScoreMatrix
    matrix_b: ScoreMatrix
    stability: float
    n_pairs: int


def compare_windows(
    table: SurveillanceTable,
    window_a: tuple[int, int],
    window_b: tuple[int, int],
    lag_max: int = DEFAULT_LAG,
    *,
    prewhiten: bool = False,
    workers: int = 1,
) -> WindowComparison:
    """Score two week windows and correlate the results.

    ``stability`` is the Pearson correlation of the two score vectors over
    the pairs scored in both windows.
    """
    ma = compute_all(table, lag_max, window_a, prewhiten=prewhiten, workers=workers)
    mb = compute_all(table, lag_max, window_b, prewhiten=prewhiten, workers=workers)
    common = ~np.isnan(ma.scores) & ~np.isnan(mb.scores)
    a, b = ma.scores[common], mb.scores[common]
    if a.size < 2:
        raise InsufficientDataError(
            f"{a.size} pair(s) scored in both windows; need at least 2"
        )
    da, db = a - a.mean(), b - b.mean()
    denom = math.sqrt(float(np.dot(da, da)) * float(np.dot(db, db)))
    if denom == 0.0:
        raise InsufficientDataError("scores are constant in a window; correlation undefined")
    stability = min(1.0, max(-1.0, float(np.dot(da, db)) / denom))
    return WindowComparison(ma, mb, stability, int(a.size))
