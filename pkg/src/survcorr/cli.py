"""Command-line entry point: ``survcorr {scores,topk,alarms,stability}``.

Exit codes: 0 success, 2 usage or data error, 1 internal error. Failures
print one line to stderr: ``survcorr: error: <kind>: <message>``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from survcorr import report
from survcorr.anomaly import alarm_overlap, cluster_alarms, ears_c
from survcorr.errors import DomainError, RangeError, SurveillanceError
from survcorr.ingest import SurveillanceTable, read_wide_csv, validate
from survcorr.scorematrix import (
    ScoreMatrix,
    compare_windows,
    compute_all,
    region_series,
    summary_stats,
    top_k,
)
from survcorr.timeseries import fill_missing, slice_weeks
from survcorr.xcorr import ccf, significance_threshold

logger = logging.getLogger("survcorr")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2


class UsageError(SurveillanceError):
    kind = "usage"


@dataclass(frozen=True)
class RunConfig:
    input_path: Path
    output_dir: Path
    week_range: Optional[tuple[int, int]] = None
    lag_max: int = 5
    alpha: float = 0.05
    baseline: int = 7
    k: int = 5
    max_gap: int = 2
    tolerance: int = 1
    prewhiten: bool = False
    threads: int = 1

    def __post_init__(self) -> None:
        if self.lag_max < 0:
            raise DomainError(f"--lag must be non-negative, got {self.lag_max}")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError(f"--alpha must lie in (0, 1), got {self.alpha}")
        if self.baseline < 2:
            raise DomainError(f"--baseline must be at least 2, got {self.baseline}")
        if self.k < 1:
            raise DomainError(f"--k must be positive, got {self.k}")
        if self.max_gap < 0:
            raise DomainError(f"--gap must be non-negative, got {self.max_gap}")
        if self.tolerance < 0:
            raise DomainError(f"--tolerance must be non-negative, got {self.tolerance}")
        if self.threads < 1:
            raise DomainError(f"--threads must be positive, got {self.threads}")

    @property
    def transform_label(self) -> str:
        return "first-differenced" if self.prewhiten else "raw"

    def title(self, text: str) -> str:
        return f"{text} (first-differenced)" if self.prewhiten else text


def parse_week_range(text: str) -> tuple[int, int]:
    first, sep, last = text.partition(":")
    if not sep or not first.strip().isdigit() or not last.strip().isdigit():
        raise UsageError(f"week range must look like A:B, got {text!r}")
    a, b = int(first), int(last)
    if not 1 <= a <= b:
        raise RangeError(f"week range {text!r} must satisfy 1 <= A <= B")
    return a, b


def parse_regions(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"regions must be comma-separated integers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", required=True, help="wide-format surveillance CSV")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--weeks", default=None, help="week range A:B (1-based, inclusive)")
    common.add_argument("--lag", type=int, default=5, help="maximum lag in weeks")
    common.add_argument("--alpha", type=float, default=0.05, help="significance level")
    common.add_argument("--baseline", type=int, default=7, help="EARS-C look-back weeks")
    common.add_argument("--k", type=int, default=5, help="partners to report")
    common.add_argument("--gap", type=int, default=2, help="max quiet weeks inside a cluster")
    common.add_argument("--tolerance", type=int, default=1, help="alarm match tolerance (weeks)")
    common.add_argument("--prewhiten", action="store_true", help="first-difference series before scoring")
    common.add_argument("--threads", type=int, default=1, help="worker threads for scoring")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="survcorr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("scores", parents=[common], help="score every region pair")
    p = sub.add_parser("topk", parents=[common], help="best-correlated partners of a region")
    p.add_argument("--region", type=int, required=True)
    p = sub.add_parser("alarms", parents=[common], help="EARS-C alarms and overlap")
    p.add_argument("--regions", required=True, help="comma-separated region indices")
    p = sub.add_parser("stability", parents=[common], help="compare two week windows")
    p.add_argument("--window-a", required=True)
    p.add_argument("--window-b", required=True)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        input_path=Path(args.input),
        output_dir=Path(args.out),
        week_range=parse_week_range(args.weeks) if args.weeks else None,
        lag_max=args.lag,
        alpha=args.alpha,
        baseline=args.baseline,
        k=args.k,
        max_gap=args.gap,
        tolerance=args.tolerance,
        prewhiten=args.prewhiten,
        threads=args.threads,
    )


def _load(config: RunConfig) -> SurveillanceTable:
    table = read_wide_csv(config.input_path)
    quality = validate(table)
    for finding in quality.fatal:
        logger.warning("region %d (%s) has no reported counts; its pairs are skipped",
                       finding.region_index, finding.district_name)
    if quality.missing_cells:
        logger.info("%d missing cells filled by interpolation", quality.missing_cells)
    return table


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _matrix(table: SurveillanceTable, config: RunConfig) -> ScoreMatrix:
    return compute_all(table, config.lag_max, config.week_range,
                       prewhiten=config.prewhiten, workers=config.threads)


def _check_region(table: SurveillanceTable, region: int) -> None:
    if not 1 <= region <= table.n_regions:
        raise RangeError(f"region {region} outside 1..{table.n_regions}")


def cmd_scores(config: RunConfig) -> int:
    table = _load(config)
    m = _matrix(table, config)
    out = config.output_dir
    stats = summary_stats(m)
    _write(out / "scores.csv", report.scores_csv(m))
    _write(out / "heatmap.svg", report.render_heatmap(m, report.PlotSpec(
        title=config.title(f"Correlation scores, weeks {m.week_range[0]}-{m.week_range[1]}"),
        width=1000, height=1000, x_label="Region index", y_label="Region index")))
    _write(out / "histogram.svg", report.render_histogram(m.stored, 30, report.PlotSpec(
        title=config.title("Distribution of correlation scores"),
        x_label="Correlation score", y_label="Pairs")))
    _write(out / "stats.json", report.stats_json(stats, {
        "pairs": int(m.stored.size),
        "skipped": len(m.skipped_pairs),
        "lag_max": m.lag_max,
        "weeks": list(m.week_range),
        "transform": config.transform_label,
    }))
    print(report.stats_caption(stats))
    print(f"pairs={m.stored.size} skipped={len(m.skipped_pairs)} "
          f"weeks={m.week_range[0]}:{m.week_range[1]} transform={config.transform_label}")
    return EXIT_OK


def cmd_topk(config: RunConfig, region: int) -> int:
    table = _load(config)
    _check_region(table, region)
    m = _matrix(table, config)
    entries = top_k(m, region, min(config.k, table.n_regions - 1))
    out = config.output_dir
    table_text = report.topk_csv(m, region, entries)
    _write(out / f"topk_{region}.csv", table_text)

    series = region_series(table, config.week_range, config.lag_max, config.prewhiten)
    x = series[region - 1]
    for entry in entries:
        y = series[entry.region - 1]
        cv = ccf(x, y, config.lag_max)
        threshold = significance_threshold(len(x), config.alpha)
        spec = report.PlotSpec(
            title=config.title(f"Regions {region} and {entry.region}, score {entry.score:.2f}"),
            width=800, height=640)
        _write(out / f"pair_{region}_{entry.region}.svg",
               report.render_pair_plot(x, y, cv, threshold, spec))
    sys.stdout.write(table_text)
    return EXIT_OK


def cmd_alarms(config: RunConfig, regions: Sequence[int]) -> int:
    if not regions:
        raise UsageError("--regions needs at least one region index")
    table = _load(config)
    for r in regions:
        _check_region(table, r)
    out = config.output_dir
    alarms = {}
    for r in regions:
        ts = fill_missing(table.row(r), region_index=r)
        if config.week_range:
            ts = slice_weeks(ts, *config.week_range, lag_max=0)
        a = ears_c(ts, config.baseline, config.alpha)
        alarms[r] = a
        _write(out / f"alarms_{r}.csv", report.alarms_csv(a))
        print(f"region {r}: {len(a.alarm_weeks)} alarms, "
              f"{len(cluster_alarms(a, config.max_gap))} clusters")

    records = []
    for ra, rb in zip(regions, regions[1:]):
        a, b = alarms[ra], alarms[rb]
        ov = alarm_overlap(a, b, config.tolerance)
        records.append(report.overlap_record(ra, rb, ov, config.tolerance))
        _write(out / f"timeline_{ra}_{rb}.svg", report.render_alarm_timeline(
            a, b, cluster_alarms(a, config.max_gap), cluster_alarms(b, config.max_gap)))
        lead = "n/a" if ov.mean_lead is None else f"{ov.mean_lead:+.2f}"
        print(f"regions {ra},{rb}: jaccard={ov.jaccard:.4f} matched={ov.matched_a} "
              f"mean_lead={lead}")
    if records:
        _write(out / "overlap.jsonl", "".join(records))
    return EXIT_OK


def cmd_stability(config: RunConfig, window_a: tuple[int, int], window_b: tuple[int, int]) -> int:
    table = _load(config)
    result = compare_windows(table, window_a, window_b, config.lag_max,
                             prewhiten=config.prewhiten, workers=config.threads)
    out = config.output_dir
    for tag, m in (("a", result.matrix_a), ("b", result.matrix_b)):
        _write(out / f"heatmap_{tag}.svg", report.render_heatmap(m, report.PlotSpec(
            title=config.title(f"Correlation scores, weeks {m.week_range[0]}-{m.week_range[1]}"),
            width=1000, height=1000, x_label="Region index", y_label="Region index")))
    print(f"{result.stability:.4f}")
    return EXIT_OK


def _dispatch(argv: Optional[Sequence[str]]) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="survcorr: %(levelname)s: %(message)s")
    config = config_from_args(args)
    if args.command == "scores":
        return cmd_scores(config)
    if args.command == "topk":
        return cmd_topk(config, args.region)
    if args.command == "alarms":
        return cmd_alarms(config, parse_regions(args.regions))
    return cmd_stability(config, parse_week_range(args.window_a), parse_week_range(args.window_b))


def _one_line(message: object) -> str:
    return " ".join(str(message).split())


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return _dispatch(argv)
    except SurveillanceError as exc:
        print(f"survcorr: error: {exc.kind}: {_one_line(exc)}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, UnicodeDecodeError) as exc:
        print(f"survcorr: error: io: {_one_line(exc)}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        logger.debug("internal error", exc_info=True)
        print(f"survcorr: error: internal: {type(exc).__name__}: {_one_line(exc)}",
              file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
