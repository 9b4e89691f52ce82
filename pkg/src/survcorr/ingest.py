"""Wide-format weekly surveillance tables.

One disease per file. The header is ``index,district,province,W1,...,WW`` and
each following row holds one district's weekly counts. Empty or whitespace-only
cells mean "not reported"; ``0`` is a true zero.
"""

from __future__ import annotations

import csv
import io
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from survcorr.errors import CellError, FormatError, UniquenessError

logger = logging.getLogger(__name__)

FIXED_COLUMNS = ("index", "district", "province")

_INT_RE = re.compile(r"[0-9]+")
_SIGNED_INT_RE = re.compile(r"[+-]?[0-9]+")


@dataclass(frozen=True)
class RegionRecord:
    index: int
    district_name: str
    province: str

    @property
    def label(self) -> str:
        """District label in the ``BOGO,EXTREME NORD`` style."""
        if self.province:
            return f"{self.district_name},{self.province}"
        return self.district_name


@dataclass(frozen=True)
class SurveillanceTable:
    regions: tuple[RegionRecord, ...]
    counts: tuple[tuple[Optional[int], ...], ...]

    @property
    def n_regions(self) -> int:
        return len(self.regions)

    @property
    def n_weeks(self) -> int:
        return len(self.counts[0]) if self.counts else 0

    @property
    def week_labels(self) -> list[str]:
        return [f"W{w}" for w in range(1, self.n_weeks + 1)]

    def region(self, index: int) -> RegionRecord:
        return self.regions[index - 1]

    def row(self, index: int) -> tuple[Optional[int], ...]:
        return self.counts[index - 1]


@dataclass(frozen=True)
class RegionFinding:
    region_index: int
    district_name: str
    missing_weeks: tuple[str, ...]
    fatal: bool

    @property
    def missing_count(self) -> int:
        return len(self.missing_weeks)


@dataclass(frozen=True)
class QualityReport:
    n_regions: int
    n_weeks: int
    findings: tuple[RegionFinding, ...] = field(default_factory=tuple)

    @property
    def fatal(self) -> tuple[RegionFinding, ...]:
        return tuple(f for f in self.findings if f.fatal)

    @property
    def ok(self) -> bool:
        return not self.fatal

    @property
    def missing_cells(self) -> int:
        return sum(f.missing_count for f in self.findings)


def _check_header(header: Sequence[str]) -> int:
    names = [h.strip() for h in header]
    if len(names) < len(FIXED_COLUMNS) + 1:
        raise FormatError(
            f"header has {len(names)} columns; expected index,district,province,W1,..."
        )
    for pos, expected in enumerate(FIXED_COLUMNS):
        if names[pos].lower() != expected:
            raise FormatError(
                f"header column {pos + 1} is {names[pos]!r}; expected {expected!r}"
            )
    for week, name in enumerate(names[len(FIXED_COLUMNS):], start=1):
        if name.upper() != f"W{week}":
            raise FormatError(
                f"header column {week + len(FIXED_COLUMNS)} is {name!r}; expected 'W{week}'"
            )
    return len(names) - len(FIXED_COLUMNS)


def _parse_count(cell: str, row: int, column: str) -> Optional[int]:
    text = cell.strip()
    if not text:
        return None
    if _INT_RE.fullmatch(text):
        return int(text, 10)
    if _SIGNED_INT_RE.fullmatch(text):
        value = int(text, 10)
        if value < 0:
            raise CellError(row, column, cell, "negative count")
        return value
    raise CellError(row, column, cell, "count is not a base-10 integer")


def parse_wide_csv(text: str) -> SurveillanceTable:
    """Parse a wide-format surveillance CSV document.

    Raises :class:`FormatError` for a malformed header or ragged row,
    :class:`CellError` for bad counts (row numbers are 1-based data rows) and
    :class:`UniquenessError` for repeated region indices.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("empty document; expected a header row") from None
    n_weeks = _check_header(header)
    width = n_weeks + len(FIXED_COLUMNS)

    regions: list[RegionRecord] = []
    counts: list[tuple[Optional[int], ...]] = []
    seen: dict[int, int] = {}
    for row_no, cells in enumerate(reader, start=1):
        if not cells:
            continue
        if len(cells) != width:
            raise FormatError(f"row {row_no} has {len(cells)} cells; expected {width}")
        raw_index = cells[0].strip()
        if not _INT_RE.fullmatch(raw_index) or int(raw_index) < 1:
            raise CellError(row_no, "index", cells[0], "index must be a positive integer")
        index = int(raw_index)
        if index in seen:
            raise UniquenessError(
                f"index {index} appears on rows {seen[index]} and {row_no}"
            )
        seen[index] = row_no
        district = cells[1].strip()
        if not district:
            raise CellError(row_no, "district", cells[1], "district name is empty")
        regions.append(RegionRecord(index, district, cells[2].strip()))
        counts.append(
            tuple(
                _parse_count(cell, row_no, f"W{week}")
                for week, cell in enumerate(cells[len(FIXED_COLUMNS):], start=1)
            )
        )

    for row_no, region in enumerate(regions, start=1):
        if region.index != row_no:
            raise FormatError(
                f"row {row_no} has index {region.index}; indices must run 1..N in row order"
            )
    if not regions:
        raise FormatError("no data rows")
    logger.debug("parsed %d regions x %d weeks", len(regions), n_weeks)
    return SurveillanceTable(tuple(regions), tuple(counts))


def read_wide_csv(path: str | Path) -> SurveillanceTable:
    return parse_wide_csv(Path(path).read_text(encoding="utf-8"))


def to_wide_csv(table: SurveillanceTable) -> str:
    """Serialize back to the wide format; absent counts become empty cells."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*FIXED_COLUMNS, *table.week_labels])
    for region, row in zip(table.regions, table.counts):
        writer.writerow(
            [region.index, region.district_name, region.province]
            + ["" if c is None else str(c) for c in row]
        )
    return buf.getvalue()


def validate(table: SurveillanceTable) -> QualityReport:
    findings = []
    labels = table.week_labels
    for region, row in zip(table.regions, table.counts):
        missing = tuple(labels[w] for w, c in enumerate(row) if c is None)
        if missing:
            findings.append(
                RegionFinding(
                    region_index=region.index,
                    district_name=region.district_name,
                    missing_weeks=missing,
                    fatal=len(missing) == len(row),
                )
            )
    return QualityReport(table.n_regions, table.n_weeks, tuple(findings))
