"""Lagged cross-correlation scoring and EARS-C alarms for weekly district surveillance counts."""

from survcorr.anomaly import (
    AlarmCluster,
    AlarmEntry,
    AlarmSeries,
    OverlapResult,
    alarm_overlap,
    cluster_alarms,
    ears_c,
)
from survcorr.errors import (
    CellError,
    DegenerateSeriesError,
    DomainError,
    EmptySeriesError,
    FormatError,
    InsufficientDataError,
    LengthError,
    PairingError,
    RangeError,
    SurveillanceError,
    UniquenessError,
)
from survcorr.ingest import (
    QualityReport,
    RegionRecord,
    SurveillanceTable,
    parse_wide_csv,
    read_wide_csv,
    to_wide_csv,
    validate,
)
from survcorr.scorematrix import (
    ScoreMatrix,
    TopKEntry,
    WindowComparison,
    compare_windows,
    compute_all,
    summary_stats,
    top_k,
)
from survcorr.timeseries import TimeSeries, difference, fill_missing, slice_weeks
from survcorr.xcorr import (
    CorrelationVector,
    ccf,
    lag_weights,
    significance_threshold,
    weighted_score,
)

__version__ = "0.1.0"

__all__ = [
    "AlarmCluster",
    "AlarmEntry",
    "AlarmSeries",
    "CellError",
    "CorrelationVector",
    "DegenerateSeriesError",
    "DomainError",
    "EmptySeriesError",
    "FormatError",
    "InsufficientDataError",
    "LengthError",
    "OverlapResult",
    "PairingError",
    "QualityReport",
    "RangeError",
    "RegionRecord",
    "ScoreMatrix",
    "SurveillanceError",
    "SurveillanceTable",
    "TimeSeries",
    "TopKEntry",
    "UniquenessError",
    "WindowComparison",
    "alarm_overlap",
    "ccf",
    "cluster_alarms",
    "compare_windows",
    "compute_all",
    "difference",
    "ears_c",
    "fill_missing",
    "lag_weights",
    "parse_wide_csv",
    "read_wide_csv",
    "significance_threshold",
    "slice_weeks",
    "summary_stats",
    "to_wide_csv",
    "top_k",
    "validate",
    "weighted_score",
]
