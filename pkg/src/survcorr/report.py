"""SVG figures and CSV/JSON exports.

Everything here is a pure function of its inputs and returns text. Numbers
are written with fixed formats so the same inputs always give the same bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from survcorr.anomaly import AlarmCluster, AlarmSeries, OverlapResult
from survcorr.errors import DomainError, InsufficientDataError
from survcorr.scorematrix import ScoreMatrix, TopKEntry, summary_stats
from survcorr.timeseries import TimeSeries
from survcorr.xcorr import CorrelationVector

GREEN = (0, 104, 55)
WHITE = (255, 255, 255)
BROWN = (140, 81, 10)
SKIPPED_FILL = "#9e9e9e"
DIAGONAL_FILL = "#d9d9d9"
SERIES_COLORS = ("#1f77b4", "#d62728")
BAND_FILL = "#ffd700"


@dataclass(frozen=True)
class PlotSpec:
    title: str = ""
    width: int = 800
    height: int = 600
    x_label: str = ""
    y_label: str = ""
    color_scheme: str = "green-brown"

    def __post_init__(self) -> None:
        if self.width < 100 or self.height < 100:
            raise DomainError(f"canvas must be at least 100x100, got {self.width}x{self.height}")
        if self.color_scheme != "green-brown":
            raise DomainError(f"unknown color scheme {self.color_scheme!r}")


def _f(x: float) -> str:
    return f"{x:.2f}"


class _Svg:
    def __init__(self, width: int, height: int) -> None:
        self.width = width
        self.height = height
        self.parts: list[str] = []

    def add(self, element: str) -> None:
        self.parts.append(element)

    def rect(self, x: float, y: float, w: float, h: float, fill: str, **attrs: str) -> None:
        self.add(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
            f'fill="{fill}"{_attrs(attrs)}/>'
        )

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str = "#000", **attrs: str) -> None:
        self.add(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}"{_attrs(attrs)}/>'
        )

    def text(
        self, x: float, y: float, content: str, size: int = 12, anchor: str = "middle", **attrs: str
    ) -> None:
        self.add(
            f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}"'
            f"{_attrs(attrs)}>{escape(content)}</text>"
        )

    def polyline(self, points: Iterable[tuple[float, float]], stroke: str, **attrs: str) -> None:
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
        self.add(f'<polyline points="{pts}" fill="none" stroke="{stroke}"{_attrs(attrs)}/>')

    def render(self) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
            f'height="{self.height}" viewBox="0 0 {self.width} {self.height}" '
            'font-family="sans-serif">\n'
        )
        body = "\n".join(self.parts)
        return f"{head}{body}\n</svg>\n"


def _attrs(attrs: dict[str, str]) -> str:
    # trailing underscore escapes keywords (class_), inner ones become dashes
    return "".join(
        f" {k.rstrip('_').replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items()
    )


def _hex(rgb: Sequence[float]) -> str:
    return "#" + "".join(f"{int(round(c)):02x}" for c in rgb)


def diverging_color(score: float, scale: float) -> str:
    """White at 0, green toward +scale, brown toward -scale."""
    if scale <= 0.0 or score == 0.0:
        return _hex(WHITE)
    t = max(-1.0, min(1.0, score / scale))
    end = GREEN if t > 0 else BROWN
    u = abs(t)
    return _hex([w + (e - w) * u for w, e in zip(WHITE, end)])


def _title_and_labels(svg: _Svg, spec: PlotSpec, left: float, top: float, pw: float, ph: float) -> None:
    if spec.title:
        svg.text(spec.width / 2, 24, spec.title, size=16, class_="title")
    if spec.x_label:
        svg.text(left + pw / 2, top + ph + 42, spec.x_label, class_="x-label")
    if spec.y_label:
        cx, cy = 16, top + ph / 2
        svg.text(cx, cy, spec.y_label, class_="y-label", transform=f"rotate(-90 {_f(cx)} {_f(cy)})")


def _tick_step(n: int, target: int = 20) -> int:
    return max(1, math.ceil(n / target))


def render_heatmap(m: ScoreMatrix, spec: Optional[PlotSpec] = None) -> str:
    """``N x N`` score grid in input order, colors scaled to ``max(|min|, |max|)``."""
    spec = spec or PlotSpec(title="Correlation scores", width=1000, height=1000,
                            x_label="Region index", y_label="Region index")
    n = m.n_regions
    if n < 2:
        raise InsufficientDataError("heatmap needs at least 2 regions")
    stored = m.stored
    scale = float(np.max(np.abs(stored))) if stored.size else 0.0

    left, top, right, bottom = 60.0, 50.0, 90.0, 60.0
    side = min(spec.width - left - right, spec.height - top - bottom)
    cell = side / n
    svg = _Svg(spec.width, spec.height)
    _title_and_labels(svg, spec, left, top, side, side)

    dense = m.dense()
    for r in range(n):
        for c in range(n):
            if r == c:
                fill = DIAGONAL_FILL
            elif math.isnan(dense[r, c]):
                fill = SKIPPED_FILL
            else:
                fill = diverging_color(float(dense[r, c]), scale)
            svg.rect(left + c * cell, top + r * cell, cell, cell, fill,
                     class_="cell", data_i=str(r + 1), data_j=str(c + 1))

    step = _tick_step(n)
    for idx in range(1, n + 1, step):
        centre = (idx - 0.5) * cell
        svg.text(left + centre, top + side + 14, str(idx), size=9, class_="tick")
        svg.text(left - 4, top + centre + 3, str(idx), size=9, anchor="end", class_="tick")

    # colour bar, top = +scale
    bar_x, bar_w, steps = left + side + 20, 16.0, 50
    for s in range(steps):
        value = scale * (1 - 2 * (s + 0.5) / steps)
        svg.rect(bar_x, top + s * side / steps, bar_w, side / steps,
                 diverging_color(value, scale), class_="colorbar")
    svg.text(bar_x + bar_w + 4, top + 10, f"{scale:.2f}", size=10, anchor="start")
    svg.text(bar_x + bar_w + 4, top + side / 2 + 4, "0", size=10, anchor="start")
    svg.text(bar_x + bar_w + 4, top + side, f"{-scale:.2f}", size=10, anchor="start")
    return svg.render()


def stats_caption(stats: dict[str, float]) -> str:
    return (
        f"Mean={stats['mean']:.2f}, SD={stats['sd']:.2f}; "
        f"Min={stats['min']:.2f}, Median={stats['median']:.2f}, Max={stats['max']:.2f}"
    )


def render_histogram(
    scores: Sequence[float], bins: int = 30, spec: Optional[PlotSpec] = None
) -> str:
    spec = spec or PlotSpec(title="Distribution of correlation scores",
                            x_label="Correlation score", y_label="Pairs")
    values = np.asarray(scores, dtype=np.float64)
    if values.size == 0:
        raise InsufficientDataError("histogram needs at least one score")
    if bins < 1:
        raise DomainError(f"bins must be positive, got {bins}")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    counts, edges = np.histogram(values, bins=bins, range=(lo, hi))
    stats = summary_stats(values)

    left, top, right, bottom = 70.0, 50.0, 30.0, 60.0
    pw, ph = spec.width - left - right, spec.height - top - bottom
    svg = _Svg(spec.width, spec.height)
    _title_and_labels(svg, spec, left, top, pw, ph)
    peak = int(counts.max())
    bw = pw / bins
    box_w, box_h = min(pw - 10, 420.0), 24.0
    bar_room = ph - box_h - 12  # headroom keeps the stats box clear of the bars
    for b, count in enumerate(counts):
        h = bar_room * count / peak
        svg.rect(left + b * bw, top + ph - h, bw, h, "#4daf4a",
                 stroke="#ffffff", class_="bar", data_count=str(int(count)))
    svg.line(left, top + ph, left + pw, top + ph)
    svg.line(left, top, left, top + ph)
    for b in range(0, bins + 1, max(1, bins // 6)):
        svg.text(left + b * bw, top + ph + 16, f"{edges[b]:.2f}", size=10, class_="tick")
    svg.text(left - 6, top + ph - bar_room + 4, str(peak), size=10, anchor="end", class_="tick")
    svg.text(left - 6, top + ph, "0", size=10, anchor="end", class_="tick")

    svg.rect(left + pw - box_w - 5, top + 5, box_w, box_h, "#ffffff", stroke="#000000",
             class_="annotation-box")
    svg.text(left + pw - box_w / 2 - 5, top + 21, stats_caption(stats), size=11,
             class_="annotation")
    return svg.render()


def _scale(values: np.ndarray, lo: float, hi: float, out_lo: float, out_hi: float) -> np.ndarray:
    if hi == lo:
        return np.full_like(values, (out_lo + out_hi) / 2, dtype=np.float64)
    return out_lo + (values - lo) * (out_hi - out_lo) / (hi - lo)


def render_pair_plot(
    x: TimeSeries,
    y: TimeSeries,
    cv: CorrelationVector,
    threshold: float,
    spec: Optional[PlotSpec] = None,
) -> str:
    """Both series on top; ccf stems with a dashed ``+/-threshold`` band below."""
    if len(x) != len(y):
        raise DomainError(f"series lengths differ: {len(x)} vs {len(y)}")
    spec = spec or PlotSpec(title=f"Regions {x.region_index} and {y.region_index}",
                            width=800, height=640)
    left, right = 70.0, 30.0
    pw = spec.width - left - right
    top1 = 50.0
    ph1 = (spec.height - 150.0) * 0.55
    top2 = top1 + ph1 + 50.0
    ph2 = spec.height - top2 - 40.0
    svg = _Svg(spec.width, spec.height)
    if spec.title:
        svg.text(spec.width / 2, 24, spec.title, size=16, class_="title")

    weeks = x.weeks.astype(np.float64)
    both = np.concatenate([x.values, y.values])
    lo, hi = float(both.min()), float(both.max())
    px = _scale(weeks, weeks[0], weeks[-1], left, left + pw)
    svg.line(left, top1 + ph1, left + pw, top1 + ph1)
    svg.line(left, top1, left, top1 + ph1)
    for ts, color in zip((x, y), SERIES_COLORS):
        py = _scale(ts.values, lo, hi, top1 + ph1, top1)
        svg.polyline(zip(px, py), color, class_="series", data_region=str(ts.region_index))
    svg.text(left - 6, top1 + 4, f"{hi:.1f}", size=10, anchor="end", class_="tick")
    svg.text(left - 6, top1 + ph1, f"{lo:.1f}", size=10, anchor="end", class_="tick")
    svg.text(left, top1 + ph1 + 16, f"W{x.start_week}", size=10, anchor="start", class_="tick")
    svg.text(left + pw, top1 + ph1 + 16, f"W{x.end_week}", size=10, anchor="end", class_="tick")
    unit = "weekly change" if x.differenced else "weekly count"
    svg.text(16, top1 + ph1 / 2, unit, class_="y-label",
             transform=f"rotate(-90 16.00 {_f(top1 + ph1 / 2)})")
    for k, (ts, color) in enumerate(zip((x, y), SERIES_COLORS)):
        svg.text(left + pw - 4, top1 + 14 + 14 * k, f"region {ts.region_index}", size=11,
                 anchor="end", fill=color, class_="legend")

    lags = cv.lags
    lag_x = _scale(lags.astype(np.float64), -cv.lag_max - 0.5, cv.lag_max + 0.5, left, left + pw)

    def y2(v: float) -> float:
        return top2 + ph2 * (1 - v) / 2

    svg.line(left, y2(0.0), left + pw, y2(0.0), class_="zero")
    svg.line(left, top2, left, top2 + ph2)
    for v in (threshold, -threshold):
        svg.line(left, y2(v), left + pw, y2(v), stroke="#1f4fd6",
                 stroke_dasharray="4 3", class_="threshold")
    for lag, xpos, value in zip(lags, lag_x, cv.values):
        svg.line(xpos, y2(0.0), xpos, y2(float(value)), stroke="#000", stroke_width="2",
                 class_="stem", data_lag=str(int(lag)), data_value=f"{value:.6f}")
        svg.add(f'<circle cx="{_f(xpos)}" cy="{_f(y2(float(value)))}" r="3" fill="#000" class="stem-head"/>')
        svg.text(xpos, top2 + ph2 + 14, str(int(lag)), size=10, class_="tick")
    for v in (1.0, 0.0, -1.0):
        svg.text(left - 6, y2(v) + 4, f"{v:.1f}", size=10, anchor="end", class_="tick")
    svg.text(left + pw / 2, top2 + ph2 + 32, "lag (weeks)", class_="x-label")
    return svg.render()


def render_alarm_timeline(
    a: AlarmSeries,
    b: AlarmSeries,
    clusters_a: Sequence[AlarmCluster],
    clusters_b: Sequence[AlarmCluster],
    spec: Optional[PlotSpec] = None,
) -> str:
    """Two stacked count curves with alarm markers and cluster bands."""
    if a.week_range != b.week_range:
        raise DomainError(f"alarm series cover different weeks: {a.week_range} vs {b.week_range}")
    spec = spec or PlotSpec(title=f"EARS-C alarms, regions {a.region_index} and {b.region_index}",
                            width=900, height=560)
    first, last = a.week_range
    left, right, top = 70.0, 30.0, 50.0
    pw = spec.width - left - right
    gap = 40.0
    ph = (spec.height - top - 40.0 - gap) / 2
    svg = _Svg(spec.width, spec.height)
    if spec.title:
        svg.text(spec.width / 2, 24, spec.title, size=16, class_="title")

    def wx(week: float) -> float:
        if last == first:
            return left + pw / 2
        return left + (week - first) * pw / (last - first)

    half = pw / max(1, last - first) / 2
    for panel, (series, clusters, color) in enumerate(
        ((a, clusters_a, SERIES_COLORS[0]), (b, clusters_b, SERIES_COLORS[1]))
    ):
        ptop = top + panel * (ph + gap)
        for cl in clusters:
            x0, x1 = wx(cl.start_week) - half, wx(cl.end_week) + half
            svg.rect(x0, ptop, x1 - x0, ph, BAND_FILL, fill_opacity="0.35",
                     class_="cluster-band", data_start=str(cl.start_week),
                     data_end=str(cl.end_week))
        if not series.entries:
            continue
        observed = np.array([e.observed for e in series.entries])
        weeks = np.array([e.week for e in series.entries], dtype=np.float64)
        lo, hi = float(observed.min()), float(observed.max())
        py = _scale(observed, lo, hi, ptop + ph, ptop)
        svg.line(left, ptop + ph, left + pw, ptop + ph)
        svg.line(left, ptop, left, ptop + ph)
        svg.polyline(zip((wx(w) for w in weeks), py), color, class_="series",
                     data_region=str(series.region_index))
        for entry, yy in zip(series.entries, py):
            if entry.alarm:
                svg.add(f'<circle cx="{_f(wx(entry.week))}" cy="{_f(yy)}" r="3.5" '
                        f'fill="#ff7f00" stroke="#000" class="alarm" data-week="{entry.week}"/>')
        svg.text(left - 6, ptop + 4, f"{hi:.1f}", size=10, anchor="end", class_="tick")
        svg.text(left - 6, ptop + ph, f"{lo:.1f}", size=10, anchor="end", class_="tick")
        svg.text(left + 4, ptop + 14, f"region {series.region_index}", size=11,
                 anchor="start", fill=color, class_="legend")
    svg.text(left, spec.height - 20, f"W{first}", size=10, anchor="start", class_="tick")
    svg.text(left + pw, spec.height - 20, f"W{last}", size=10, anchor="end", class_="tick")
    return svg.render()


# ---- tables -----------------------------------------------------------------


def _csv_text(rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def scores_csv(m: ScoreMatrix) -> str:
    """``i,j,score`` rows for ``i < j`` (6 significant digits), then skipped pairs."""
    rows: list[Sequence[object]] = [("i", "j", "score")]
    iu, ju = m.pairs()
    for i, j, s in zip(iu, ju, m.scores):
        if not math.isnan(s):
            rows.append((int(i), int(j), f"{s:.6g}"))
    for sp in m.skipped_pairs:
        rows.append((sp.i, sp.j, f"SKIPPED:{sp.reason}"))
    return _csv_text(rows)


def alarms_csv(a: AlarmSeries) -> str:
    rows: list[Sequence[object]] = [("week", "observed", "mean", "sd", "threshold", "alarm")]
    for e in a.entries:
        rows.append((e.week, f"{e.observed:.6g}", f"{e.mean:.6g}", f"{e.sd:.6g}",
                     f"{e.threshold:.6g}", int(e.alarm)))
    return _csv_text(rows)


def topk_csv(m: ScoreMatrix, region: int, entries: Sequence[TopKEntry]) -> str:
    """Ranked partners laid out as ``Region Pairs, Correlation Scores``."""
    own = f"{region} {m.labels[region - 1]}"
    rows: list[Sequence[object]] = [("Region Pairs", "Correlation Scores")]
    for e in entries:
        rows.append((f"{own}; {e.region} {e.label}", f"{e.score:.2f}"))
    return _csv_text(rows)


def overlap_record(region_a: int, region_b: int, result: OverlapResult, tolerance: int) -> str:
    """One JSON-lines record (with trailing newline) for an alarm overlap."""
    payload = {
        "region_a": region_a,
        "region_b": region_b,
        "tolerance": tolerance,
        "jaccard": round(result.jaccard, 6),
        "matched_a": result.matched_a,
        "matched_b": result.matched_b,
        "mean_lead": None if result.mean_lead is None else round(result.mean_lead, 6),
        "pairs": [list(p) for p in result.pairs],
    }
    return json.dumps(payload, sort_keys=True) + "\n"


def stats_json(stats: dict[str, float], extra: Optional[dict[str, object]] = None) -> str:
    payload: dict[str, object] = {k: round(v, 6) for k, v in stats.items()}
    payload.update(extra or {})
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
