"""Command-line entry point: ``procperf {evaluate,perf,compare,report}``.

Each subcommand renders all of its outputs in memory first, then writes them
through temp files renamed into place. A failing run leaves the output
directory untouched and exits with status 1.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .errors import ValidationError
from .ingest import (
    BUNDLED_TABLE,
    ModelSummaryFixture,
    iter_predictions,
    load_class_manifest,
    load_summary_fixtures,
    load_timing_log,
)
from .metrics import RankCounter, TopKCurve, summarize_curve
from .perf import (
    ScalingSeries,
    TradeoffPoint,
    epoch_stats,
    pareto_front,
    scaling_efficiency,
    speedup_series,
    total_training_time,
)
from .report import (
    PlotSpec,
    render_metrics_table,
    render_perf_table,
    render_proc_svg,
    render_ranking_table,
    render_scaling_svg,
    render_tradeoff_svg,
    render_youden_svg,
)

SCHEMA_VERSION = 1
PLOT_KINDS = ("proc", "youden", "scaling", "tradeoff")
DEFAULT_EPOCHS = 65
DEFAULT_BASELINE_G = 2
DEFAULT_TRADEOFF_G = 64


@dataclass
class RunConfig:
    subcommand: str
    out: Path
    fmt: str = "md"
    plots: list[str] | None = None
    log_x: bool = False
    predictions: Path | None = None
    classes: Path | None = None
    model: str | None = None
    timings: Path | None = None
    fixtures: str | None = None
    metrics: list[Path] = field(default_factory=list)
    input_dir: Path | None = None
    exclude_first: int = 0
    epochs_total: int = DEFAULT_EPOCHS
    baseline_g: int = DEFAULT_BASELINE_G
    tradeoff_g: int = DEFAULT_TRADEOFF_G
    with_chance: bool = False

    def __post_init__(self) -> None:
        if self.epochs_total < 1:
            raise ValueError("--epochs-total must be >= 1")
        if self.exclude_first < 0:
            raise ValueError("--exclude-first must be >= 0")
        if self.baseline_g < 1 or self.tradeoff_g < 1:
            raise ValueError("GPU counts must be >= 1")

    def wants(self, kind: str, default: bool) -> bool:
        return default if self.plots is None else kind in self.plots


def _dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_atomic(out_dir: Path, files: dict[str, str]) -> list[Path]:
    """Write every file to a temp name first, then rename them all into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    staged: list[tuple[str, Path]] = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.", suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((name, Path(tmp)))
    except BaseException:
        for _, tmp in staged:
            tmp.unlink(missing_ok=True)
        raise
    written = []
    for name, tmp in staged:
        target = out_dir / name
        os.replace(tmp, target)
        written.append(target)
    return written


def metrics_document(model: str, curve: TopKCurve) -> dict:
    s = summarize_curve(curve)
    return {
        "schema": "procperf.metrics",
        "schema_version": SCHEMA_VERSION,
        "model": model,
        "num_classes": s.num_classes,
        "num_samples": s.num_samples,
        "top1": s.top1,
        "top5": s.top5,
        "auc": s.auc,
        "auc_norm": s.auc_norm,
        "j_max": s.j_max,
        "k_at_jmax": s.k_at_jmax,
        "hits": list(curve.hits),
        "acc": list(curve.acc),
    }


def read_metrics_document(path: Path) -> tuple[str, TopKCurve]:
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc.msg}", path=str(path), line=exc.lineno) from None
    if not isinstance(doc, dict) or doc.get("schema") != "procperf.metrics":
        raise ValidationError("not a metrics document", path=str(path))
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {doc.get('schema_version')!r}", path=str(path))
    try:
        curve = TopKCurve(doc["num_classes"], tuple(doc["hits"]), doc["num_samples"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed metrics document ({exc})", path=str(path)) from None
    except ValidationError as exc:
        raise ValidationError(exc.message, path=str(path)) from None
    return str(doc.get("model", path.parent.name)), curve


def _accuracy_outputs(
    cfg: RunConfig, labelled: list[tuple[str, TopKCurve]], default_plots: bool
) -> dict[str, str]:
    rows = [(label, summarize_curve(c)) for label, c in labelled]
    chance = sorted({c.num_classes for _, c in labelled}) if cfg.with_chance else None
    files = {f"table.{cfg.fmt}": render_metrics_table(rows, cfg.fmt, chance_classes=chance)}

    groups: dict[int, list[tuple[str, TopKCurve]]] = {}
    for label, c in labelled:
        groups.setdefault(c.num_classes, []).append((label, c))
    single = len(groups) == 1
    for n, group in sorted(groups.items()):
        suffix = "" if single else f"-{n}"
        if cfg.wants("proc", default_plots):
            files[f"proc{suffix}.svg"] = render_proc_svg(group, PlotSpec("proc", log_x=cfg.log_x))
        if cfg.wants("youden", default_plots):
            files[f"youden{suffix}.svg"] = render_youden_svg(group, PlotSpec("youden"))
    return files


def cmd_evaluate(cfg: RunConfig) -> list[Path]:
    manifest = load_class_manifest(cfg.classes)
    counter = RankCounter(len(manifest))
    counter.update(iter_predictions(cfg.predictions, manifest))
    if counter.total == 0:
        raise ValidationError("predictions file has no records", path=str(cfg.predictions))
    curve = counter.curve()
    model = cfg.model or Path(cfg.predictions).stem
    files = {"metrics.json": _dumps(metrics_document(model, curve))}
    files.update(_accuracy_outputs(cfg, [(model, curve)], default_plots=True))
    return write_atomic(cfg.out, files)


def _load_fixtures(cfg: RunConfig) -> list[ModelSummaryFixture]:
    return load_summary_fixtures(cfg.fixtures) if cfg.fixtures else []


def _collect_series(cfg: RunConfig, fixtures: list[ModelSummaryFixture]) -> dict[str, ScalingSeries]:
    series: dict[str, ScalingSeries] = {}
    if cfg.timings:
        records = load_timing_log(cfg.timings)
        if records:
            series.update(epoch_stats(records, cfg.exclude_first))
    # fixture times are already per-epoch representatives; warmup exclusion does not apply
    fixture_records = [r for fx in fixtures for r in fx.timing_records()]
    if fixture_records:
        for model, s in epoch_stats(fixture_records).items():
            if model in series:
                raise ValidationError(f"model {model!r} appears in both the timing log and the fixtures")
            series[model] = s
    return dict(sorted(series.items()))


def perf_document(series: dict[str, ScalingSeries], cfg: RunConfig) -> dict:
    models = {}
    for model, s in series.items():
        models[model] = {
            "seconds_per_epoch": dict(s.points),
            "speedup": speedup_series(s, cfg.baseline_g),
            "efficiency": scaling_efficiency(s, cfg.baseline_g),
            "total_hours": {g: total_training_time(sec, cfg.epochs_total) for g, sec in s.points.items()},
        }
    return {
        "schema": "procperf.perf",
        "schema_version": SCHEMA_VERSION,
        "baseline_g": cfg.baseline_g,
        "epochs_total": cfg.epochs_total,
        "exclude_first": cfg.exclude_first,
        "models": models,
    }


def cmd_perf(cfg: RunConfig) -> list[Path]:
    if not cfg.timings and not cfg.fixtures:
        raise ValidationError("perf needs --timings and/or --fixtures")
    series = _collect_series(cfg, _load_fixtures(cfg))
    if not series:
        raise ValidationError("no timing records found")
    doc = perf_document(series, cfg)
    files = {
        "perf.json": _dumps(doc),
        f"perf.{cfg.fmt}": render_perf_table(doc["models"], cfg.fmt),
    }
    if cfg.wants("scaling", True):
        files["scaling.svg"] = render_scaling_svg(list(series.values()), PlotSpec("scaling"))
    return write_atomic(cfg.out, files)


@dataclass
class _Entry:
    model: str
    auc_norm: float
    j_max: float
    k_at_jmax: int | None
    num_classes: int | None
    time_per_epoch: float | None = None


def rank_entries(entries: list[_Entry]) -> list[dict]:
    """Order by auc_norm, then j_max, both descending; equal pairs share a rank."""
    ordered = sorted(entries, key=lambda e: (-e.auc_norm, -e.j_max, e.model))
    ranked = []
    prev_key, rank = None, 0
    for pos, e in enumerate(ordered, start=1):
        key = (e.auc_norm, e.j_max)
        if key != prev_key:
            rank, prev_key = pos, key
        ranked.append({
            "rank": rank,
            "model": e.model,
            "num_classes": e.num_classes,
            "auc_norm": e.auc_norm,
            "j_max": e.j_max,
            "k_at_jmax": e.k_at_jmax,
            "time_per_epoch": e.time_per_epoch,
        })
    return ranked


def cmd_compare(cfg: RunConfig) -> list[Path]:
    entries: list[_Entry] = []
    for path in cfg.metrics:
        model, curve = read_metrics_document(Path(path))
        s = summarize_curve(curve)
        entries.append(_Entry(model, s.auc_norm, s.j_max, s.k_at_jmax, s.num_classes))
    fixtures = _load_fixtures(cfg)
    fixture_times: dict[str, float] = {}
    for fx in fixtures:
        if fx.is_chance:
            continue
        entries.append(_Entry(fx.label, fx.auc_norm, fx.j_max, fx.k_at_jmax, None))
        if cfg.tradeoff_g in fx.times:
            fixture_times[fx.label] = fx.times[cfg.tradeoff_g]
    if not entries:
        raise ValidationError("compare needs at least one --metrics file or --fixtures table")
    labels = [e.model for e in entries]
    dupes = sorted({m for m in labels if labels.count(m) > 1})
    if dupes:
        raise ValidationError(f"duplicate model labels: {', '.join(dupes)}")

    series = epoch_stats(load_timing_log(cfg.timings), cfg.exclude_first) if cfg.timings else {}
    for e in entries:
        if e.model in series and cfg.tradeoff_g in series[e.model].points:
            e.time_per_epoch = series[e.model].points[cfg.tradeoff_g]
        elif e.model in fixture_times:
            e.time_per_epoch = fixture_times[e.model]

    ranked = rank_entries(entries)
    points = [TradeoffPoint(e.model, e.time_per_epoch, e.auc_norm) for e in entries if e.time_per_epoch is not None]
    front = pareto_front(points) if points else []
    doc = {
        "schema": "procperf.compare",
        "schema_version": SCHEMA_VERSION,
        "tradeoff_g": cfg.tradeoff_g,
        "ranking": ranked,
        "pareto_front": [p.model_id for p in front],
    }
    files = {"compare.json": _dumps(doc), f"ranking.{cfg.fmt}": render_ranking_table(ranked, cfg.fmt)}
    if points and cfg.wants("tradeoff", True):
        files["tradeoff.svg"] = render_tradeoff_svg(points, front, PlotSpec("tradeoff", log_x=cfg.log_x))
    return write_atomic(cfg.out, files)


def cmd_report(cfg: RunConfig) -> list[Path]:
    labelled: list[tuple[str, TopKCurve]] = []
    if cfg.input_dir is not None:
        if not cfg.input_dir.is_dir():
            raise ValidationError("not a directory", path=str(cfg.input_dir))
        for path in sorted(cfg.input_dir.rglob("metrics.json")):
            labelled.append(read_metrics_document(path))
    fixtures = _load_fixtures(cfg)
    if not labelled and not fixtures:
        raise ValidationError("no metrics found", path=str(cfg.input_dir or cfg.fixtures or "."))

    files: dict[str, str] = {}
    if labelled:
        files.update(_accuracy_outputs(cfg, labelled, default_plots=True))
    if fixtures:
        rows = [((fx.model_type, fx.backbone), fx) for fx in fixtures]
        files[f"fixtures-table.{cfg.fmt}" if labelled else f"table.{cfg.fmt}"] = render_metrics_table(rows, cfg.fmt)
        series = _collect_series(RunConfig("report", cfg.out), fixtures)
        if series and cfg.wants("scaling", True):
            files["scaling.svg"] = render_scaling_svg(list(series.values()), PlotSpec("scaling"))
        points = [
            TradeoffPoint(fx.label, fx.times[cfg.tradeoff_g], fx.auc_norm)
            for fx in fixtures
            if not fx.is_chance and cfg.tradeoff_g in fx.times
        ]
        if points and cfg.wants("tradeoff", True):
            files["tradeoff.svg"] = render_tradeoff_svg(points, pareto_front(points), PlotSpec("tradeoff", log_x=cfg.log_x))
    return write_atomic(cfg.out, files)


COMMANDS = {
    "evaluate": cmd_evaluate,
    "perf": cmd_perf,
    "compare": cmd_compare,
    "report": cmd_report,
}


def _plot_list(text: str) -> list[str]:
    kinds = [t.strip() for t in text.split(",") if t.strip()]
    bad = [k for k in kinds if k not in PLOT_KINDS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown plot kind(s): {', '.join(bad)}")
    return kinds


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--format", dest="fmt", choices=("csv", "md"), default="md")
    common.add_argument(
        "--plots", type=_plot_list, action="extend", nargs="*",
        help="plots to write (comma or space separated); pass with no value for none",
    )
    common.add_argument("--log-x", action="store_true", help="log-scale the k / time axis")
    common.add_argument("--exclude-first", type=int, default=0, metavar="N",
                        help="warmup epochs to drop before averaging")
    common.add_argument("--tradeoff-g", type=int, default=DEFAULT_TRADEOFF_G, metavar="G",
                        help="GPU count whose epoch time is used in the trade-off plot")
    common.add_argument("--fixtures", help=f"summary table CSV ({BUNDLED_TABLE} for the bundled one)")

    parser = argparse.ArgumentParser(prog="procperf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    ev = sub.add_parser("evaluate", parents=[common], help="metrics from a predictions file")
    ev.add_argument("--predictions", type=Path, required=True)
    ev.add_argument("--classes", type=Path, required=True)
    ev.add_argument("--model", help="label for this run (default: predictions file stem)")
    ev.add_argument("--with-chance", action="store_true", help="prepend the random-chance row")

    pf = sub.add_parser("perf", parents=[common], help="timing, speedup and efficiency")
    pf.add_argument("--timings", type=Path)
    pf.add_argument("--epochs-total", type=int, default=DEFAULT_EPOCHS)
    pf.add_argument("--baseline-g", type=int, default=DEFAULT_BASELINE_G)

    cp = sub.add_parser("compare", parents=[common], help="rank models and find the trade-off front")
    cp.add_argument("--metrics", type=Path, nargs="+", default=[])
    cp.add_argument("--timings", type=Path)

    rp = sub.add_parser("report", parents=[common], help="re-render tables and plots from saved metrics")
    rp.add_argument("--input", dest="input_dir", type=Path, help="directory searched for metrics.json files")
    rp.add_argument("--with-chance", action="store_true", help="prepend the random-chance row")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    plots = args.plots
    if plots is not None:
        plots = [k for group in plots for k in (group if isinstance(group, list) else [group])]
    known = {f for f in RunConfig.__dataclass_fields__}
    values = {k: v for k, v in vars(args).items() if k in known}
    values["plots"] = plots
    return RunConfig(**values)


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        written = COMMANDS[cfg.subcommand](cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        target = exc.filename if exc.filename is not None else ""
        print(f"error: cannot access {target}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0
