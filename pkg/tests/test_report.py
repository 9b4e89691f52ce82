from __future__ import annotations

import csv
import io
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from survcorr import report
from survcorr.anomaly import AlarmCluster, alarm_overlap, cluster_alarms, ears_c
from survcorr.errors import DomainError
from survcorr.scorematrix import ScoreMatrix, SkippedPair, compute_all, summary_stats, top_k
from survcorr.timeseries import TimeSeries
from survcorr.xcorr import CorrelationVector, ccf
from synth import random_table

SVG = "{http://www.w3.org/2000/svg}"


def parse(doc: str) -> ET.Element:
    return ET.fromstring(doc.encode("utf-8"))


def by_class(root: ET.Element, cls: str) -> list[ET.Element]:
    return [el for el in root.iter() if el.get("class") == cls]


def two_region(score: float) -> ScoreMatrix:
    return ScoreMatrix(2, np.array([score]), 5, (1, 20), ("A,P", "B,P"))


def cell_fill(root, i, j):
    (cell,) = [c for c in by_class(root, "cell") if c.get("data-i") == str(i) and c.get("data-j") == str(j)]
    return cell.get("fill")


def test_heatmap_endpoints():
    root = parse(report.render_heatmap(two_region(39.0)))
    green = report._hex(report.GREEN)
    assert cell_fill(root, 1, 2) == cell_fill(root, 2, 1) == green
    root = parse(report.render_heatmap(two_region(-12.0)))
    assert cell_fill(root, 1, 2) == report._hex(report.BROWN)
    root = parse(report.render_heatmap(two_region(0.0)))
    assert cell_fill(root, 1, 2) == "#ffffff"


def test_heatmap_skipped_pairs_gray():
    m = ScoreMatrix(3, np.array([4.0, math.nan, -2.0]), 5, (1, 20), ("A", "B", "C"),
                    (SkippedPair(1, 3, "region 3 constant series"),))
    root = parse(report.render_heatmap(m))
    assert cell_fill(root, 1, 3) == cell_fill(root, 3, 1) == report.SKIPPED_FILL
    assert cell_fill(root, 2, 2) == report.DIAGONAL_FILL


def test_heatmap_full_size_geometry():
    m = compute_all(random_table(1, 189, 20))
    spec = report.PlotSpec(width=1000, height=1000)
    root = parse(report.render_heatmap(m, spec))
    cells = by_class(root, "cell")
    assert len(cells) == 189 * 189
    right = max(float(c.get("x")) + float(c.get("width")) for c in cells)
    bottom = max(float(c.get("y")) + float(c.get("height")) for c in cells)
    assert right <= 1000 and bottom <= 1000
    assert root.get("width") == "1000"


def test_color_map_monotone_and_symmetric():
    def intensity(color):
        return 3 * 255 - sum(int(color[k:k + 2], 16) for k in (1, 3, 5))

    grid = np.linspace(-10, 10, 81)
    colors = [report.diverging_color(v, 10.0) for v in grid]
    levels = [intensity(c) for c in colors]
    # distance from white grows with |score| on both sides
    left, right = levels[:41][::-1], levels[40:]
    assert all(a <= b for a, b in zip(right, right[1:]))
    assert all(a <= b for a, b in zip(left, left[1:]))
    for v in np.linspace(0, 10, 21):
        pos = report.diverging_color(v, 10.0)
        neg = report.diverging_color(-v, 10.0)
        # same fraction of the way to the respective endpoint
        for c_pos, c_neg, g, b in zip((pos[1:3], pos[3:5], pos[5:7]), (neg[1:3], neg[3:5], neg[5:7]),
                                      report.GREEN, report.BROWN):
            frac_p = (255 - int(c_pos, 16)) / (255 - g) if g != 255 else 0
            frac_n = (255 - int(c_neg, 16)) / (255 - b) if b != 255 else 0
            assert frac_p == pytest.approx(frac_n, abs=0.02)


def test_histogram_single_and_symmetric():
    root = parse(report.render_histogram([3.5]))
    counts = [int(b.get("data-count")) for b in by_class(root, "bar")]
    assert len(counts) == 30 and sorted(counts)[-2:] == [0, 1]
    root = parse(report.render_histogram([-1.0, 1.0]))
    bars = [b for b in by_class(root, "bar") if b.get("data-count") != "0"]
    assert len(bars) == 2
    assert bars[0].get("height") == bars[1].get("height")


def test_histogram_annotation_format():
    caption = report.stats_caption(
        {"mean": 3.02, "sd": 7.44, "min": -24.22, "median": 2.40, "max": 29.96})
    assert caption == "Mean=3.02, SD=7.44; Min=-24.22, Median=2.40, Max=29.96"
    scores = [-24.22, 2.40, 29.96]
    root = parse(report.render_histogram(scores))
    (note,) = by_class(root, "annotation")
    assert note.text == report.stats_caption(summary_stats(np.array(scores)))


def _stems(root):
    return by_class(root, "stem")


def test_pair_plot_identical_series():
    rng = np.random.default_rng(2)
    x = TimeSeries(1, 1, rng.poisson(10, 50))
    y = TimeSeries(2, 1, x.values)
    cv = ccf(x, y)
    root = parse(report.render_pair_plot(x, y, cv, 0.27))
    stems = _stems(root)
    assert len(stems) == 11
    (lag0,) = [s for s in stems if s.get("data-lag") == "0"]
    assert float(lag0.get("data-value")) == pytest.approx(1.0)
    curves = by_class(root, "series")
    assert curves[0].get("points") == curves[1].get("points")
    assert len(by_class(root, "threshold")) == 2


def test_pair_plot_no_stem_crosses_band():
    x = TimeSeries(1, 1, np.arange(30.0))
    y = TimeSeries(2, 1, np.arange(30.0)[::-1])
    cv = CorrelationVector(5, np.linspace(-0.1, 0.1, 11), 30)
    root = parse(report.render_pair_plot(x, y, cv, 0.136))
    band = sorted(float(line.get("y1")) for line in by_class(root, "threshold"))
    for stem in _stems(root):
        tip = float(stem.get("y2"))
        assert band[0] < tip < band[1]


def test_alarm_timeline_bands():
    rng = np.random.default_rng(4)
    values = rng.poisson(20, 40).astype(float)
    values[[12, 13, 20]] = 80
    a = ears_c(TimeSeries(1, 1, values))
    b = ears_c(TimeSeries(2, 1, values + 1))
    root = parse(report.render_alarm_timeline(a, b, [AlarmCluster(10, 12, 2)], []))
    (band,) = by_class(root, "cluster-band")
    assert (band.get("data-start"), band.get("data-end")) == ("10", "12")
    assert len(by_class(root, "alarm")) == 2 * len(a.alarm_weeks)

    flat = ears_c(TimeSeries(1, 1, [5.0] * 30))
    root = parse(report.render_alarm_timeline(flat, flat, [], []))
    assert by_class(root, "alarm") == [] and by_class(root, "cluster-band") == []


def test_aligned_bands_for_both_regions():
    flat = ears_c(TimeSeries(1, 1, [5.0] * 30))
    root = parse(report.render_alarm_timeline(flat, flat, [AlarmCluster(12, 14, 3)],
                                              [AlarmCluster(12, 14, 2)]))
    bands = by_class(root, "cluster-band")
    assert len(bands) == 2
    assert bands[0].get("x") == bands[1].get("x") and bands[0].get("width") == bands[1].get("width")


def test_renderers_are_deterministic():
    table = random_table(3, 6, 60)
    m1, m2 = compute_all(table), compute_all(table, workers=3)
    assert report.render_heatmap(m1) == report.render_heatmap(m2)
    assert report.render_histogram(m1.stored) == report.render_histogram(m2.stored)


def test_plot_spec_validation():
    with pytest.raises(DomainError):
        report.PlotSpec(width=99)
    with pytest.raises(DomainError):
        report.PlotSpec(color_scheme="viridis")


def test_scores_csv_format():
    m = ScoreMatrix(3, np.array([12.3456789, math.nan, -0.000123456789]), 5, (1, 20),
                    ("A", "B", "C"), (SkippedPair(1, 3, "region 3 constant series"),))
    rows = list(csv.reader(io.StringIO(report.scores_csv(m))))
    assert rows == [["i", "j", "score"], ["1", "2", "12.3457"], ["2", "3", "-0.000123457"],
                    ["1", "3", "SKIPPED:region 3 constant series"]]


def test_alarms_csv_format():
    a = ears_c(TimeSeries(1, 1, [1, 2, 3, 4, 5, 6, 7, 100]))
    assert report.alarms_csv(a) == (
        "week,observed,mean,sd,threshold,alarm\n8,100,4,2.16025,8.52634,1\n")


def test_topk_table_layout():
    m = ScoreMatrix(3, np.array([27.561, 29.96, 1.0]), 5, (1, 20),
                    ("BOGO,EXTREME NORD", "MOULVOUDAYE,EXTREME NORD", "MAGA,EXTREME NORD"))
    text = report.topk_csv(m, 1, top_k(m, 1, 2))
    rows = list(csv.reader(io.StringIO(text)))
    assert rows == [
        ["Region Pairs", "Correlation Scores"],
        ["1 BOGO,EXTREME NORD; 3 MAGA,EXTREME NORD", "29.96"],
        ["1 BOGO,EXTREME NORD; 2 MOULVOUDAYE,EXTREME NORD", "27.56"],
    ]


def test_overlap_record():
    a = ears_c(TimeSeries(1, 1, [5.0] * 7 + [9.0] + [5.0] * 5))
    rec = json.loads(report.overlap_record(1, 2, alarm_overlap(a, a), 1))
    assert rec["jaccard"] == 1.0 and rec["mean_lead"] == 0.0 and rec["pairs"] == [[8, 8]]
    assert cluster_alarms(a) == [AlarmCluster(8, 8, 1)]
