"""Accuracy tables in CSV or Markdown.

Percentages get 2 decimals and unit-interval metrics 3, with the best k
appended to J_max as ``0.683 (k = 41)``. The random-chance row is the one
exception: trailing zeros are trimmed there (``0.5``, ``0.0``).
"""

from __future__ import annotations

import csv
import io
from typing import Sequence, Union

from ..ingest import ModelSummaryFixture
from ..metrics import ProcSummary, random_chance_curve, summarize_curve

Labels = Union[str, tuple[str, ...]]
Row = tuple[Labels, Union[ProcSummary, ModelSummaryFixture]]

HEADER = ["Model Type", "Backbone", "Top-1 (%)", "Top-5 (%)", "AUC_norm", "J_max"]
PERF_HEADER = ["Model", "GPUs", "Seconds/epoch", "Speedup", "Efficiency", "Total hours"]


def _trim(value: float, places: int) -> str:
    text = f"{value:.{places}f}".rstrip("0")
    return text + "0" if text.endswith(".") else text


def _split_labels(labels: Labels) -> tuple[str, str]:
    if isinstance(labels, str):
        return labels, ""
    parts = tuple(labels) + ("", "")
    return parts[0], " ".join(p for p in parts[1:] if p)


def _cells(labels: Labels, item: ProcSummary | ModelSummaryFixture, chance: bool) -> list[str]:
    model_type, backbone = _split_labels(labels)
    if isinstance(item, ModelSummaryFixture):
        top1, top5, k = item.top1, item.top5, item.k_at_jmax
        chance = chance or item.is_chance
    else:
        top1 = item.top1 * 100
        top5 = None if item.top5 is None else item.top5 * 100
        k = item.k_at_jmax
    top5_cell = "n/a" if top5 is None else f"{top5:.2f}"
    if chance:
        auc_cell, j_cell = _trim(item.auc_norm, 3), _trim(item.j_max, 3)
    else:
        auc_cell = f"{item.auc_norm:.3f}"
        j_cell = f"{item.j_max:.3f}" + ("" if k is None else f" (k = {k})")
    return [model_type, backbone, f"{top1:.2f}", top5_cell, auc_cell, j_cell]


def _emit(header: list[str], rows: list[list[str]], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    if fmt in ("md", "markdown"):
        lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
        lines += ["| " + " | ".join(c.replace("|", "\\|") for c in r) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")


def render_metrics_table(
    summaries: Sequence[Row],
    fmt: str = "md",
    chance_classes: int | Sequence[int] | None = None,
) -> str:
    """Render accuracy rows.

    ``chance_classes`` prepends one analytic random-chance row per class count.
    """
    if isinstance(chance_classes, int):
        chance_classes = [chance_classes]
    chance_classes = list(chance_classes or [])
    if not summaries and not chance_classes:
        raise ValueError("nothing to render")
    rows = []
    for n in chance_classes:
        chance = summarize_curve(random_chance_curve(n))
        label = "random chance" if len(chance_classes) == 1 else f"random chance ({n} classes)"
        rows.append(_cells((label, ""), chance, chance=True))
    rows += [_cells(labels, item, chance=False) for labels, item in summaries]
    return _emit(HEADER, rows, fmt)


def render_ranking_table(ranked: Sequence[dict], fmt: str = "md") -> str:
    header = ["Rank", "Model", "Classes", "AUC_norm", "J_max", "Time/epoch (s)"]
    rows = []
    for r in ranked:
        k = r.get("k_at_jmax")
        rows.append([
            str(r["rank"]),
            r["model"],
            "" if r.get("num_classes") is None else str(r["num_classes"]),
            f"{r['auc_norm']:.3f}",
            f"{r['j_max']:.3f}" + ("" if k is None else f" (k = {k})"),
            "" if r.get("time_per_epoch") is None else f"{r['time_per_epoch']:.1f}",
        ])
    return _emit(header, rows, fmt)


def render_perf_table(models: dict[str, dict], fmt: str = "md") -> str:
    rows = []
    for model, info in models.items():
        for g, sec in info["seconds_per_epoch"].items():
            rows.append([
                model,
                str(g),
                f"{sec:.1f}",
                f"{info['speedup'][g]:.2f}",
                f"{info['efficiency'][g]:.2f}",
                f"{info['total_hours'][g]:.2f}",
            ])
    return _emit(PERF_HEADER, rows, fmt)
