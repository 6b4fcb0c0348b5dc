"""Confusion matrix and the class-wise / macro metric suite.

Rows are true labels, columns are predicted labels. Per class i:
recall = tp / (tp + fn), precision = tp / (tp + fp), F1 = harmonic mean.
Macro metrics are unweighted means over the four classes, which keeps the
Normal-heavy class balance from dominating the summary.

Everything is computed in full precision; rounding to two decimals happens
only at the reporting boundary (round_pct).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ..errors import ValidationError
from ..labels import CRITICAL_LABELS, NORMAL_SUBTYPE_NAMES, ClassLabel

NUM_CLASSES = 4


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: tuple[tuple[int, ...], ...]  # 4x4, rows = truth, cols = prediction

    def __post_init__(self) -> None:
        arr = np.asarray(self.counts)
        if arr.shape != (NUM_CLASSES, NUM_CLASSES):
            raise ValidationError(f"confusion matrix must be 4x4, got {arr.shape}")
        if (arr < 0).any():
            raise ValidationError("confusion matrix counts must be non-negative")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64)

    @property
    def total(self) -> int:
        return int(self.array.sum())

    @property
    def trace(self) -> int:
        return int(np.trace(self.array))

    def row_sum(self, label: ClassLabel) -> int:
        return int(self.array[int(label)].sum())

    def col_sum(self, label: ClassLabel) -> int:
        return int(self.array[:, int(label)].sum())


def confusion_from_records(
    truths: Sequence[ClassLabel | int], predictions: Sequence[ClassLabel | int]
) -> ConfusionMatrix:
    if len(truths) != len(predictions):
        raise ValidationError(
            f"length mismatch: {len(truths)} truths vs {len(predictions)} predictions"
        )
    counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
    for t, p in zip(truths, predictions):
        counts[int(t)][int(p)] += 1
    return ConfusionMatrix(tuple(tuple(int(x) for x in row) for row in counts))


@dataclass(frozen=True)
class ClassMetrics:
    label: ClassLabel
    tp: int
    fn: int
    fp: int
    recall: float
    precision: float
    f1: float
    degenerate: bool = False  # a zero denominator was reported as 0


def class_metrics_from_counts(
    tp: int, fn: int, fp: int, label: ClassLabel | int = ClassLabel.FALLING
) -> ClassMetrics:
    degenerate = False
    if tp + fn > 0:
        recall = tp / (tp + fn)
    else:
        recall, degenerate = 0.0, True
    if tp + fp > 0:
        precision = tp / (tp + fp)
    else:
        precision, degenerate = 0.0, True
    if precision + recall > 0:
        f1 = 2 * precision * recall / (precision + recall)
    else:
        f1, degenerate = 0.0, True
    return ClassMetrics(
        label=ClassLabel(int(label)),
        tp=tp,
        fn=fn,
        fp=fp,
        recall=recall,
        precision=precision,
        f1=f1,
        degenerate=degenerate,
    )


def class_metrics(cm: ConfusionMatrix, label: ClassLabel | int) -> ClassMetrics:
    i = int(label)
    arr = cm.array
    tp = int(arr[i, i])
    fn = int(arr[i].sum() - tp)  # same row, excluding the diagonal
    fp = int(arr[:, i].sum() - tp)  # same column, excluding the diagonal
    return class_metrics_from_counts(tp, fn, fp, label)


def all_class_metrics(cm: ConfusionMatrix) -> list[ClassMetrics]:
    return [class_metrics(cm, label) for label in ClassLabel]


@dataclass(frozen=True)
class MacroMetrics:
    macro_recall: float
    macro_precision: float
    macro_f1: float


def macro_metrics(per_class: Sequence[ClassMetrics]) -> MacroMetrics:
    """Unweighted means over all four classes."""
    if len(per_class) != NUM_CLASSES:
        raise ValidationError(f"macro metrics need all {NUM_CLASSES} classes")
    labels = {m.label for m in per_class}
    if len(labels) != NUM_CLASSES:
        raise ValidationError("macro metrics need one entry per class")
    return MacroMetrics(
        macro_recall=float(np.mean([m.recall for m in per_class])),
        macro_precision=float(np.mean([m.precision for m in per_class])),
        macro_f1=float(np.mean([m.f1 for m in per_class])),
    )


def round_pct(fraction: float) -> float:
    """Fraction -> percentage with two decimals; the only rounding point."""
    return round(fraction * 100.0, 2)


@dataclass(frozen=True)
class LabeledPrediction:
    truth: ClassLabel
    predicted: ClassLabel
    normal_subtype: Optional[int] = None


def misclass_breakdown(
    records: Iterable[LabeledPrediction],
    subtype_names: Sequence[str] = NORMAL_SUBTYPE_NAMES,
) -> dict[ClassLabel, list[tuple[str, int]]]:
    """Which routine activities get mistaken for each critical class.

    Groups Normal-truth errors by subtype name per critical predicted
    column, sorted by count descending then name ascending.
    """
    tallies: dict[ClassLabel, dict[str, int]] = {
        label: {} for label in sorted(CRITICAL_LABELS)
    }
    for rec in records:
        if rec.truth != ClassLabel.NORMAL or rec.predicted not in CRITICAL_LABELS:
            continue
        if rec.normal_subtype is None:
            raise ValidationError("Normal-truth record is missing its subtype")
        name = subtype_names[rec.normal_subtype]
        bucket = tallies[rec.predicted]
        bucket[name] = bucket.get(name, 0) + 1
    return {
        label: sorted(bucket.items(), key=lambda kv: (-kv[1], kv[0]))
        for label, bucket in tallies.items()
    }
