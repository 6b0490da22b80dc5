"""Static SVG 1.1 plots with no third-party dependencies.

Output is a pure function of the inputs: coordinates are printed with two
decimals and colors come from a fixed palette indexed by sorted label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence
from xml.sax.saxutils import escape, quoteattr

from ..errors import ValidationError
from ..metrics import TopKCurve, youden_max, youden_transform
from ..perf import ScalingSeries, TradeoffPoint

__all__ = [
    "PlotSpec",
    "render_proc_svg",
    "render_youden_svg",
    "render_scaling_svg",
    "render_tradeoff_svg",
]

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)
CHANCE_COLOR = "#555555"

KINDS = ("proc", "youden", "scaling", "tradeoff")
_DEFAULT_AXES = {
    "proc": (False, False),
    "youden": (True, False),
    "scaling": (True, True),
    "tradeoff": (False, False),
}


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    log_x: bool | None = None
    log_y: bool | None = None
    width: int = 720
    height: int = 460
    title: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if self.width < 200 or self.height < 150:
            raise ValueError("plot is too small")
        default_x, default_y = _DEFAULT_AXES[self.kind]
        if self.log_x is None:
            object.__setattr__(self, "log_x", default_x)
        if self.log_y is None:
            object.__setattr__(self, "log_y", default_y)


def _f(v: float) -> str:
    return f"{v:.2f}"


def _num_label(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return f"{v:.3g}"


def color_map(labels: Iterable[str]) -> dict[str, str]:
    return {lab: PALETTE[i % len(PALETTE)] for i, lab in enumerate(sorted(set(labels)))}


class _Axis:
    def __init__(self, lo: float, hi: float, p0: float, p1: float, log_base: float | None = None):
        if log_base is not None and lo <= 0:
            raise ValueError("log axis needs positive bounds")
        if hi <= lo:
            if log_base:
                lo, hi = lo / log_base, hi * log_base
            else:
                lo, hi = lo - 0.5, hi + 0.5
        self.lo, self.hi, self.p0, self.p1, self.base = lo, hi, p0, p1, log_base

    def _t(self, v: float) -> float:
        return math.log(v, self.base) if self.base else v

    def __call__(self, v: float) -> float:
        frac = (self._t(v) - self._t(self.lo)) / (self._t(self.hi) - self._t(self.lo))
        return self.p0 + frac * (self.p1 - self.p0)

    def contains(self, v: float) -> bool:
        return not self.base or v > 0

    def ticks(self) -> list[float]:
        if self.base == 2:
            lo_e, hi_e = math.ceil(math.log2(self.lo) - 1e-9), math.floor(math.log2(self.hi) + 1e-9)
            return [2.0**e for e in range(lo_e, hi_e + 1)]
        if self.base:
            lo_e, hi_e = math.floor(math.log10(self.lo)), math.ceil(math.log10(self.hi))
            out = [m * 10.0**e for e in range(lo_e, hi_e + 1) for m in (1, 2, 5)]
            out = [t for t in out if self.lo * (1 - 1e-9) <= t <= self.hi * (1 + 1e-9)]
            if len(out) > 8:
                out = [t for t in out if round(t / 10.0 ** math.floor(math.log10(t))) == 1]
            return out
        span = self.hi - self.lo
        raw = span / 5
        mag = 10.0 ** math.floor(math.log10(raw))
        step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
        first = math.ceil(self.lo / step - 1e-9)
        out = []
        i = first
        while i * step <= self.hi + step * 1e-9:
            out.append(round(i * step, 10))
            i += 1
        return out


class _Figure:
    margin_left, margin_right, margin_top, margin_bottom = 70, 190, 40, 60

    def __init__(self, spec: PlotSpec, title: str, x_label: str, y_label: str):
        self.spec = spec
        self.title = spec.title if spec.title is not None else title
        self.x_label, self.y_label = x_label, y_label
        self.left = self.margin_left
        self.right = spec.width - self.margin_right
        self.top = self.margin_top
        self.bottom = spec.height - self.margin_bottom
        self.body: list[str] = []
        self.legend: list[tuple[str, str, str]] = []  # (label, color, style)
        self.notes: list[str] = []

    def axes(self, x: _Axis, y: _Axis) -> None:
        self.x, self.y = x, y

    def polyline(self, pts: Sequence[tuple[float, float]], color: str, cls: str, dashed: bool = False) -> None:
        coords = " ".join(f"{_f(self.x(a))},{_f(self.y(b))}" for a, b in pts)
        dash = ' stroke-dasharray="6 4"' if dashed else ""
        self.body.append(
            f'<polyline class="{cls}" points="{coords}" fill="none" stroke="{color}" stroke-width="2"{dash}/>'
        )

    def marker(self, a: float, b: float, color: str, cls: str, r: float = 4, data: str = "", label: str | None = None) -> None:
        cx, cy = _f(self.x(a)), _f(self.y(b))
        stroke = ' stroke="#000000" stroke-width="2"' if "front" in cls.split() or cls == "peak" else ""
        self.body.append(f'<circle class="{cls}" cx="{cx}" cy="{cy}" r="{r}" fill="{color}"{stroke}{data}/>')
        if label is not None:
            self.body.append(
                f'<text class="point-label" x="{_f(self.x(a) + 6)}" y="{_f(self.y(b) - 6)}" font-size="10">{escape(label)}</text>'
            )

    def _axis_markup(self) -> list[str]:
        out = [
            f'<line x1="{self.left}" y1="{self.bottom}" x2="{self.right}" y2="{self.bottom}" stroke="#000000"/>',
            f'<line x1="{self.left}" y1="{self.top}" x2="{self.left}" y2="{self.bottom}" stroke="#000000"/>',
        ]
        for t in self.x.ticks():
            px = _f(self.x(t))
            out.append(f'<line x1="{px}" y1="{self.bottom}" x2="{px}" y2="{self.bottom + 5}" stroke="#000000"/>')
            out.append(
                f'<text class="tick" x="{px}" y="{self.bottom + 18}" font-size="11" text-anchor="middle">{_num_label(t)}</text>'
            )
        for t in self.y.ticks():
            py = _f(self.y(t))
            out.append(f'<line x1="{self.left - 5}" y1="{py}" x2="{self.left}" y2="{py}" stroke="#000000"/>')
            out.append(
                f'<line x1="{self.left}" y1="{py}" x2="{self.right}" y2="{py}" stroke="#e5e5e5"/>'
            )
            out.append(
                f'<text class="tick" x="{self.left - 8}" y="{_f(self.y(t) + 4)}" font-size="11" text-anchor="end">{_num_label(t)}</text>'
            )
        mid_x = (self.left + self.right) / 2
        mid_y = (self.top + self.bottom) / 2
        out.append(
            f'<text class="axis-label" x="{_f(mid_x)}" y="{self.bottom + 42}" font-size="13" text-anchor="middle">{escape(self.x_label)}</text>'
        )
        out.append(
            f'<text class="axis-label" x="18" y="{_f(mid_y)}" font-size="13" text-anchor="middle" '
            f'transform="rotate(-90 18 {_f(mid_y)})">{escape(self.y_label)}</text>'
        )
        return out

    def _legend_markup(self) -> list[str]:
        x0 = self.right + 20
        out = ['<g class="legend">']
        y = self.top + 10
        for label, color, style in self.legend:
            out.append('<g class="legend-entry">')
            if style == "marker":
                out.append(f'<circle cx="{x0 + 10}" cy="{y - 4}" r="4" fill="{color}"/>')
            elif style == "front":
                out.append(f'<circle cx="{x0 + 10}" cy="{y - 4}" r="6" fill="{color}" stroke="#000000" stroke-width="2"/>')
            else:
                dash = ' stroke-dasharray="6 4"' if style == "dashed" else ""
                out.append(
                    f'<line x1="{x0}" y1="{y - 4}" x2="{x0 + 20}" y2="{y - 4}" stroke="{color}" stroke-width="2"{dash}/>'
                )
            out.append(f'<text x="{x0 + 26}" y="{y}" font-size="11">{escape(label)}</text>')
            out.append("</g>")
            y += 18
        for note in self.notes:
            out.append(f'<text class="note" x="{x0}" y="{y + 6}" font-size="10" font-style="italic">{escape(note)}</text>')
            y += 16
        out.append("</g>")
        return out

    def render(self) -> str:
        w, h = self.spec.width, self.spec.height
        parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
            f'viewBox="0 0 {w} {h}" font-family="sans-serif" data-kind="{self.spec.kind}">',
            f"<title>{escape(self.title)}</title>",
            f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
            f'<text class="title" x="{_f((self.left + self.right) / 2)}" y="22" font-size="15" text-anchor="middle">{escape(self.title)}</text>',
            '<g class="axes">',
            *self._axis_markup(),
            "</g>",
            '<g class="series">',
            *self.body,
            "</g>",
            *self._legend_markup(),
            "</svg>",
        ]
        return "\n".join(parts) + "\n"


def _common_classes(curves: Sequence[tuple[str, TopKCurve]], num_classes: int | None) -> int:
    sizes = {c.num_classes for _, c in curves}
    if num_classes is not None:
        sizes.add(num_classes)
    if not sizes:
        raise ValidationError("no curves to plot")
    if len(sizes) > 1:
        raise ValidationError(f"curves have different class counts: {sorted(sizes)}")
    return sizes.pop()


def render_proc_svg(
    curves: Sequence[tuple[str, TopKCurve]],
    spec: PlotSpec | None = None,
    *,
    num_classes: int | None = None,
) -> str:
    """Top-k accuracy against k for each curve plus the dashed chance line.

    With no curves, ``num_classes`` alone draws just the chance line.
    """
    spec = spec or PlotSpec("proc")
    c = _common_classes(curves, num_classes)
    fig = _Figure(spec, f"p-ROC ({c} classes)", "k", "Top-k accuracy")
    k_lo = 1 if spec.log_x else 0
    y_lo = min((v for _, cv in curves for v in cv.acc if v > 0), default=1 / c) if spec.log_y else 0.0
    fig.axes(
        _Axis(k_lo, c, fig.left, fig.right, 10 if spec.log_x else None),
        _Axis(y_lo, 1.0, fig.bottom, fig.top, 10 if spec.log_y else None),
    )
    colors = color_map(label for label, _ in curves)
    for label, cv in curves:
        pts = [(k, a) for k, a in enumerate(cv.acc) if fig.x.contains(k) and fig.y.contains(a)]
        fig.polyline(pts, colors[label], "curve")
        fig.legend.append((label, colors[label], "line"))
    fig.polyline([(k_lo, k_lo / c), (c, 1.0)], CHANCE_COLOR, "chance", dashed=True)
    fig.legend.append(("random chance", CHANCE_COLOR, "dashed"))
    if spec.log_x:
        fig.notes.append("k = 0 not shown (log axis)")
    return fig.render()


def render_youden_svg(
    curves: Sequence[tuple[str, TopKCurve]], spec: PlotSpec | None = None
) -> str:
    """acc(k) - k/|C| against k (log-x by default) with each curve's peak marked."""
    spec = spec or PlotSpec("youden")
    c = _common_classes(curves, None)
    fig = _Figure(spec, f"Youden index J(k) ({c} classes)", "k", "Top-k accuracy - k/|C|")
    k_lo = 1 if spec.log_x else 0
    transforms = [(label, youden_transform(cv), youden_max(cv)) for label, cv in curves]
    values = [v for _, t, _ in transforms for v in t[k_lo:]]
    lo, hi = min(0.0, min(values)), max(values)
    if hi - lo < 1e-12:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    fig.axes(
        _Axis(k_lo, c, fig.left, fig.right, 10 if spec.log_x else None),
        _Axis(lo - (pad if lo < 0 else 0), hi + pad, fig.bottom, fig.top),
    )
    colors = color_map(label for label, _ in curves)
    fig.polyline([(k_lo, 0.0), (c, 0.0)], CHANCE_COLOR, "chance", dashed=True)
    for label, t, (j, k) in transforms:
        fig.polyline([(i, v) for i, v in enumerate(t) if i >= k_lo], colors[label], "curve")
        shown_k = max(k, k_lo)
        data = f' data-k="{shown_k}" data-value="{j:.4f}"'
        fig.marker(shown_k, j, colors[label], "peak", r=5, data=data)
        fig.legend.append((f"{label} (J_max {j:.3f} at k = {k})", colors[label], "line"))
    fig.legend.append(("random chance", CHANCE_COLOR, "dashed"))
    if spec.log_x:
        fig.notes.append("k = 0 not shown (log axis)")
    return fig.render()


def render_scaling_svg(series: Sequence[ScalingSeries], spec: PlotSpec | None = None) -> str:
    """Seconds per epoch against GPU count, markers only at measured configurations."""
    spec = spec or PlotSpec("scaling")
    if not series:
        raise ValidationError("no scaling series to plot")
    gs = [g for s in series for g in s.points]
    secs = [v for s in series for v in s.points.values()]
    fig = _Figure(spec, "Training time per epoch", "GPUs g (nodes = g/2)", "Seconds per epoch")
    fig.axes(
        _Axis(min(gs), max(gs), fig.left, fig.right, 2 if spec.log_x else None),
        _Axis(min(secs), max(secs), fig.bottom, fig.top, 10 if spec.log_y else None),
    )
    colors = color_map(s.model_id for s in series)
    for s in sorted(series, key=lambda s: s.model_id):
        color = colors[s.model_id]
        pts = list(s.points.items())
        if len(pts) > 1:
            fig.polyline(pts, color, "series-line")
        for g, v in pts:
            fig.marker(g, v, color, "point", data=f' data-g="{g}" data-seconds="{v}"')
        fig.legend.append((s.model_id, color, "line" if len(pts) > 1 else "marker"))
    return fig.render()


def render_tradeoff_svg(
    points: Sequence[TradeoffPoint],
    front: Sequence[TradeoffPoint],
    spec: PlotSpec | None = None,
) -> str:
    """Time per epoch against normalized AUC; front members drawn larger with an outline."""
    spec = spec or PlotSpec("tradeoff")
    if not points:
        raise ValidationError("no trade-off points to plot")
    times = [p.time_per_epoch for p in points]
    aucs = [p.auc_norm for p in points]
    fig = _Figure(spec, "Accuracy vs. training cost", "Training time per epoch (s)", "AUC_norm")
    t_lo, t_hi = min(times), max(times)
    a_lo, a_hi = min(aucs), max(aucs)
    t_pad = 0.08 * (t_hi - t_lo) if t_hi > t_lo else 0.1 * t_lo
    a_pad = 0.1 * (a_hi - a_lo) if a_hi > a_lo else 0.01
    if spec.log_x:
        x_axis = _Axis(t_lo / 1.2, t_hi * 1.2, fig.left, fig.right, 10)
    else:
        x_axis = _Axis(max(t_lo - t_pad, 0.0), t_hi + t_pad, fig.left, fig.right)
    fig.axes(x_axis, _Axis(a_lo - a_pad, min(a_hi + a_pad, 1.0), fig.bottom, fig.top))
    colors = color_map(p.model_id for p in points)
    front_ids = {id(p) for p in front}
    front_keys = {(p.model_id, p.time_per_epoch, p.auc_norm) for p in front}
    for p in sorted(points, key=lambda p: (p.time_per_epoch, -p.auc_norm, p.model_id)):
        on_front = id(p) in front_ids or (p.model_id, p.time_per_epoch, p.auc_norm) in front_keys
        cls = "point front" if on_front else "point"
        data = f' data-model={quoteattr(p.model_id)}'
        fig.marker(p.time_per_epoch, p.auc_norm, colors[p.model_id], cls, r=7 if on_front else 4, data=data, label=p.model_id)
    fig.legend.append(("Pareto front", "#ffffff", "front"))
    fig.legend.append(("dominated", "#999999", "marker"))
    return fig.render()
