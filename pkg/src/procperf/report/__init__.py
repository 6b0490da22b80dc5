"""Table and SVG renderers."""

from .emit import dump_predictions, dump_timing_log
from .svg import PlotSpec, render_proc_svg, render_scaling_svg, render_tradeoff_svg, render_youden_svg
from .tables import render_metrics_table, render_perf_table, render_ranking_table

__all__ = [
    "PlotSpec",
    "dump_predictions",
    "dump_timing_log",
    "render_metrics_table",
    "render_perf_table",
    "render_ranking_table",
    "render_proc_svg",
    "render_scaling_svg",
    "render_tradeoff_svg",
    "render_youden_svg",
]
