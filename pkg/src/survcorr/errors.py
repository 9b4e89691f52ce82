"""Exception hierarchy.

Every error raised for bad input derives from :class:`SurveillanceError`, so
the command line can map all of them to a single exit code. ``kind`` is the
short machine-readable tag printed in CLI error lines.
"""

from __future__ import annotations


class SurveillanceError(ValueError):
    kind = "data"


class FormatError(SurveillanceError):
    kind = "format"


class CellError(SurveillanceError):
    kind = "cell"

    def __init__(self, row: int, column: str, value: str, reason: str) -> None:
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}, column {column}: {reason} ({value!r})")


class UniquenessError(SurveillanceError):
    kind = "uniqueness"


class RangeError(SurveillanceError):
    kind = "range"


class LengthError(SurveillanceError):
    kind = "length"


class PairingError(SurveillanceError):
    kind = "pairing"


class DegenerateSeriesError(SurveillanceError):
    kind = "degenerate"


class InsufficientDataError(SurveillanceError):
    kind = "insufficient-data"


class EmptySeriesError(SurveillanceError):
    kind = "empty-series"


class DomainError(SurveillanceError):
    kind = "domain"
