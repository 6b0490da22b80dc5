"""Per-epoch timing aggregation, strong-scaling curves and the time/accuracy front."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from statistics import fmean
from typing import Iterable, Mapping, Sequence

from .errors import ValidationError

__all__ = [
    "TimingRecord",
    "ScalingSeries",
    "TradeoffPoint",
    "epoch_stats",
    "total_training_time",
    "speedup_series",
    "scaling_efficiency",
    "dominates",
    "pareto_front",
]


@dataclass(frozen=True)
class TimingRecord:
    model_id: str
    gpus: int
    epoch: int
    seconds: float

    def __post_init__(self) -> None:
        if self.gpus < 1:
            raise ValidationError(f"gpus must be >= 1, got {self.gpus}", field="gpus")
        if self.epoch < 0:
            raise ValidationError(f"epoch must be >= 0, got {self.epoch}", field="epoch")
        if not (math.isfinite(self.seconds) and self.seconds > 0):
            raise ValidationError(f"seconds must be positive, got {self.seconds}", field="seconds")


@dataclass(frozen=True)
class ScalingSeries:
    """Representative seconds-per-epoch for one model at each measured GPU count."""

    model_id: str
    points: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.points:
            raise ValidationError(f"series {self.model_id!r} has no points")
        for g, sec in self.points.items():
            if g < 1 or not (math.isfinite(sec) and sec > 0):
                raise ValidationError(f"series {self.model_id!r}: bad point g={g}, seconds={sec}")
        object.__setattr__(self, "points", dict(sorted(self.points.items())))

    def __hash__(self) -> int:
        return hash((self.model_id, tuple(self.points.items())))


@dataclass(frozen=True)
class TradeoffPoint:
    model_id: str
    time_per_epoch: float
    auc_norm: float

    def __post_init__(self) -> None:
        if not self.time_per_epoch > 0:
            raise ValidationError(f"{self.model_id!r}: time_per_epoch must be positive")
        if not 0 < self.auc_norm < 1:
            raise ValidationError(f"{self.model_id!r}: auc_norm must lie in (0, 1)")


def epoch_stats(records: Iterable[TimingRecord], exclude_first: int = 0) -> dict[str, ScalingSeries]:
    """Mean seconds per epoch for each (model, gpus) group.

    Epochs with index below ``exclude_first`` (warmup) are dropped before
    averaging. Models come back sorted by id.
    """
    if exclude_first < 0:
        raise ValueError("exclude_first must be >= 0")
    groups: dict[tuple[str, int], list[float]] = defaultdict(list)
    seen: set[tuple[str, int]] = set()
    for rec in records:
        seen.add((rec.model_id, rec.gpus))
        if rec.epoch >= exclude_first:
            groups[(rec.model_id, rec.gpus)].append(rec.seconds)
    if not seen:
        raise ValidationError("no timing records")
    for key in sorted(seen):
        if key not in groups:
            raise ValidationError(
                f"model {key[0]!r} at g={key[1]} has no epochs left after excluding the first {exclude_first}"
            )
    by_model: dict[str, dict[int, float]] = defaultdict(dict)
    for (model, g), secs in groups.items():
        by_model[model][g] = fmean(secs)
    return {m: ScalingSeries(m, by_model[m]) for m in sorted(by_model)}


def total_training_time(seconds_per_epoch: float, epochs: int) -> float:
    """Wall-clock hours for ``epochs`` epochs at ``seconds_per_epoch`` each."""
    if not seconds_per_epoch > 0 or epochs < 1:
        raise ValueError("seconds_per_epoch and epochs must both be positive")
    return seconds_per_epoch * epochs / 3600


def _baseline(series: ScalingSeries, baseline_g: int) -> float:
    try:
        return series.points[baseline_g]
    except KeyError:
        raise ValidationError(
            f"model {series.model_id!r} has no measurement at baseline g={baseline_g}"
        ) from None


def speedup_series(series: ScalingSeries, baseline_g: int) -> dict[int, float]:
    base = _baseline(series, baseline_g)
    return {g: (1.0 if g == baseline_g else base / sec) for g, sec in series.points.items()}


def scaling_efficiency(series: ScalingSeries, baseline_g: int) -> dict[int, float]:
    """Strong-scaling efficiency; values above 1 (super-linear) are kept as-is."""
    return {
        g: (1.0 if g == baseline_g else s * baseline_g / g)
        for g, s in speedup_series(series, baseline_g).items()
    }


def dominates(a: TradeoffPoint, b: TradeoffPoint) -> bool:
    """``a`` is no slower and no less accurate than ``b``, and strictly better in one."""
    return (
        a.time_per_epoch <= b.time_per_epoch
        and a.auc_norm >= b.auc_norm
        and (a.time_per_epoch < b.time_per_epoch or a.auc_norm > b.auc_norm)
    )


def pareto_front(points: Sequence[TradeoffPoint]) -> list[TradeoffPoint]:
    """Non-dominated points (minimize time, maximize auc_norm), fastest first.

    Exactly coincident points are all kept.
    """
    if not points:
        raise ValidationError("no trade-off points")
    ordered = sorted(points, key=lambda p: (p.time_per_epoch, -p.auc_norm))
    front: list[TradeoffPoint] = []
    best = -math.inf
    for p in ordered:
        if p.auc_norm > best:
            front.append(p)
            best = p.auc_norm
        elif front and (p.time_per_epoch, p.auc_norm) == (front[-1].time_per_epoch, front[-1].auc_norm):
            front.append(p)
    return front
