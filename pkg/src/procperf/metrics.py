"""Top-k accuracy curves and the area / Youden metrics derived from them.

Everything here works on integer hit counts: ``hits[k]`` is the number of
samples whose true class lies among the ``k`` best-scored classes. Float
values are only produced at the last step, each as a single division of
integers, so results do not depend on sample order or partitioning.

Ranking rule: classes are ordered by score descending, ties broken by
ascending class index.

The area is the trapezoid sum ``sum_k (acc(k) + acc(k+1)) / 2`` over
``k = 0 .. |C|-1``. The commonly printed variant with ``acc(k+1) - acc(k)``
in the numerator telescopes to ``(acc(|C|) - acc(0)) / 2 = 0.5`` for every
classifier and is not used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ValidationError

__all__ = [
    "Sample",
    "EvalSet",
    "TopKCurve",
    "ProcSummary",
    "RankCounter",
    "true_class_rank",
    "accuracy_at_k",
    "accuracy_curve",
    "auc",
    "auc_norm",
    "youden_transform",
    "youden_max",
    "random_chance_curve",
    "summarize",
    "summarize_curve",
]


@dataclass(frozen=True)
class Sample:
    sample_id: str
    true_label: int
    scores: tuple[float, ...]


def _check_sample(sample: Sample, num_classes: int) -> None:
    sid = sample.sample_id
    if len(sample.scores) != num_classes:
        raise ValidationError(
            f"sample {sid!r} has {len(sample.scores)} scores, expected {num_classes}",
            field="scores",
        )
    for score in sample.scores:
        if isinstance(score, bool) or not isinstance(score, (int, float)) or not math.isfinite(score):
            raise ValidationError(f"sample {sid!r} has non-finite score {score!r}", field="scores")
    label = sample.true_label
    if isinstance(label, bool) or not isinstance(label, int) or not 0 <= label < num_classes:
        raise ValidationError(
            f"sample {sid!r} has true_label {label!r} outside [0, {num_classes})",
            field="true_label",
        )


@dataclass(frozen=True)
class EvalSet:
    """Per-sample class scores with their true labels."""

    num_classes: int
    samples: tuple[Sample, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.num_classes, int) or self.num_classes < 1:
            raise ValidationError(f"num_classes must be a positive integer, got {self.num_classes!r}")
        object.__setattr__(self, "samples", tuple(self.samples))
        if not self.samples:
            raise ValidationError("evaluation set has no samples")
        for sample in self.samples:
            _check_sample(sample, self.num_classes)

    @classmethod
    def from_rows(
        cls, num_classes: int, rows: Iterable[tuple[Sequence[float], int]]
    ) -> EvalSet:
        """Build from ``(scores, label)`` pairs, numbering sample ids from 0."""
        samples = tuple(
            Sample(str(i), label, tuple(scores)) for i, (scores, label) in enumerate(rows)
        )
        return cls(num_classes, samples)

    def __len__(self) -> int:
        return len(self.samples)


def true_class_rank(scores: Sequence[float], label: int) -> int:
    """1-based position of ``label`` when classes are sorted by the ranking rule."""
    target = scores[label]
    ahead = 0
    for j, s in enumerate(scores):
        if s > target or (s == target and j < label):
            ahead += 1
    return ahead + 1


@dataclass(frozen=True)
class TopKCurve:
    """acc(k) for k = 0..num_classes, stored as integer hits over ``total``."""

    num_classes: int
    hits: tuple[int, ...]
    total: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "hits", tuple(self.hits))
        if self.num_classes < 1:
            raise ValidationError("num_classes must be >= 1")
        if self.total < 1:
            raise ValidationError("curve needs a positive sample count")
        if len(self.hits) != self.num_classes + 1:
            raise ValidationError(
                f"curve has {len(self.hits)} points, expected {self.num_classes + 1}"
            )
        if self.hits[0] != 0:
            raise ValidationError("acc(0) must be 0")
        prev = 0
        for h in self.hits:
            if h < prev or h > self.total:
                raise ValidationError("hit counts must be non-decreasing and within [0, total]")
            prev = h

    @classmethod
    def from_fractions(cls, values: Sequence[Fraction | int]) -> TopKCurve:
        """Build from exact acc(k) values, e.g. ``[0, Fraction(2, 3), 1]``."""
        fracs = [Fraction(v) for v in values]
        total = math.lcm(*(f.denominator for f in fracs))
        hits = [int(f * total) for f in fracs]
        return cls(len(fracs) - 1, tuple(hits), total)

    @property
    def acc(self) -> tuple[float, ...]:
        return tuple(h / self.total for h in self.hits)

    def fraction(self, k: int) -> Fraction:
        return Fraction(self.hits[k], self.total)


class RankCounter:
    """Streaming accumulator of true-class ranks.

    Memory is one counter per rank, so it can consume arbitrarily long
    prediction streams. Counters from disjoint partitions combine with
    ``merge``.
    """

    def __init__(self, num_classes: int) -> None:
        if num_classes < 1:
            raise ValueError("num_classes must be >= 1")
        self.num_classes = num_classes
        self._rank_counts = [0] * (num_classes + 1)
        self.total = 0

    def add(self, sample: Sample) -> None:
        _check_sample(sample, self.num_classes)
        self._rank_counts[true_class_rank(sample.scores, sample.true_label)] += 1
        self.total += 1

    def update(self, samples: Iterable[Sample]) -> RankCounter:
        for sample in samples:
            self.add(sample)
        return self

    def merge(self, other: RankCounter) -> RankCounter:
        if other.num_classes != self.num_classes:
            raise ValueError("cannot merge counters with different class counts")
        for r, c in enumerate(other._rank_counts):
            self._rank_counts[r] += c
        self.total += other.total
        return self

    def curve(self) -> TopKCurve:
        if self.total == 0:
            raise ValidationError("evaluation set has no samples")
        hits = [0]
        running = 0
        for k in range(1, self.num_classes + 1):
            running += self._rank_counts[k]
            hits.append(running)
        return TopKCurve(self.num_classes, tuple(hits), self.total)


def accuracy_at_k(eval_set: EvalSet, k: int) -> float:
    """Fraction of samples whose true class is among the ``k`` top-ranked classes."""
    if not 0 <= k <= eval_set.num_classes:
        raise ValueError(f"k={k} outside [0, {eval_set.num_classes}]")
    hits = sum(1 for s in eval_set.samples if true_class_rank(s.scores, s.true_label) <= k)
    return hits / len(eval_set.samples)


def accuracy_curve(eval_set: EvalSet) -> TopKCurve:
    return RankCounter(eval_set.num_classes).update(eval_set.samples).curve()


def _auc_numerator(curve: TopKCurve) -> int:
    # 2 * N * AUC, an exact integer
    h = curve.hits
    return sum(h[k] + h[k + 1] for k in range(curve.num_classes))


def auc(curve: TopKCurve) -> float:
    """Trapezoid area under acc(k) on k in [0, |C|] with unit spacing."""
    return _auc_numerator(curve) / (2 * curve.total)


def auc_norm(curve: TopKCurve) -> float:
    """Area divided by the class count; comparable across datasets."""
    return auc(curve) / curve.num_classes


def _youden_numerators(curve: TopKCurve) -> list[int]:
    # N * |C| * (acc(k) - k/|C|)
    n, c = curve.total, curve.num_classes
    return [h * c - k * n for k, h in enumerate(curve.hits)]


def youden_transform(curve: TopKCurve) -> list[float]:
    """Height of the curve above the chance line, acc(k) - k/|C|, per k."""
    denom = curve.total * curve.num_classes
    return [v / denom for v in _youden_numerators(curve)]


def youden_max(curve: TopKCurve) -> tuple[float, int]:
    """Maximum Youden index and the smallest k attaining it."""
    nums = _youden_numerators(curve)
    best_k = 0
    for k, v in enumerate(nums):
        if v > nums[best_k]:
            best_k = k
    return nums[best_k] / (curve.total * curve.num_classes), best_k


def random_chance_curve(num_classes: int) -> TopKCurve:
    """The uninformed guesser: acc(k) = k / num_classes."""
    if num_classes < 1:
        raise ValueError("num_classes must be >= 1")
    return TopKCurve(num_classes, tuple(range(num_classes + 1)), num_classes)


@dataclass(frozen=True)
class ProcSummary:
    top1: float
    top5: float | None
    auc: float
    auc_norm: float
    j_max: float
    k_at_jmax: int
    num_classes: int
    num_samples: int


def summarize_curve(curve: TopKCurve) -> ProcSummary:
    j, k = youden_max(curve)
    return ProcSummary(
        top1=curve.hits[1] / curve.total,
        top5=curve.hits[5] / curve.total if curve.num_classes >= 5 else None,
        auc=auc(curve),
        auc_norm=auc_norm(curve),
        j_max=j,
        k_at_jmax=k,
        num_classes=curve.num_classes,
        num_samples=curve.total,
    )


def summarize(eval_set: EvalSet) -> ProcSummary:
    return summarize_curve(accuracy_curve(eval_set))
