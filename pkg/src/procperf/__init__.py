"""Top-k (p-ROC) accuracy metrics and distributed-training performance analysis."""

from .errors import FormatError, ValidationError
from .metrics import (
    EvalSet,
    ProcSummary,
    RankCounter,
    Sample,
    TopKCurve,
    accuracy_at_k,
    accuracy_curve,
    auc,
    auc_norm,
    random_chance_curve,
    summarize,
    summarize_curve,
    youden_max,
    youden_transform,
)
from .perf import (
    ScalingSeries,
    TimingRecord,
    TradeoffPoint,
    epoch_stats,
    pareto_front,
    scaling_efficiency,
    speedup_series,
    total_training_time,
)

__version__ = "0.1.0"

__all__ = [
    "EvalSet",
    "FormatError",
    "ProcSummary",
    "RankCounter",
    "Sample",
    "ScalingSeries",
    "TimingRecord",
    "TopKCurve",
    "TradeoffPoint",
    "ValidationError",
    "accuracy_at_k",
    "accuracy_curve",
    "auc",
    "auc_norm",
    "epoch_stats",
    "pareto_front",
    "random_chance_curve",
    "scaling_efficiency",
    "speedup_series",
    "summarize",
    "summarize_curve",
    "total_training_time",
    "youden_max",
    "youden_transform",
]
