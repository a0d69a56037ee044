"""Stratified splitting, confusion matrices, and classification reports.

Conventions fixed here and relied on everywhere else:

* per-class test size rounds half up, with any remainder reconciled against
  the majority class so the overall test fraction also rounds half up;
* matrix rows are the true class (0 then 1), columns the predicted class;
* zero-denominator precision/recall are defined as 0, never NaN;
* balanced accuracy is the mean of the two per-class recalls.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .errors import DegenerateClass, LengthMismatch


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class SplitAssignment:
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]
    fraction: float
    seed: int


def stratified_split(data: LabeledDataset, test_fraction: float, seed: int) -> SplitAssignment:
    """Split within each outcome class, uniformly at random, deterministically.

    Raises DegenerateClass when any class would be left with an empty train
    or test side.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test fraction {test_fraction} outside (0, 1)")
    y = data.y
    classes = [0, 1]
    per_class_positions = {c: np.flatnonzero(y == c) for c in classes}
    for c in classes:
        if per_class_positions[c].size < 2:
            raise DegenerateClass(f"class {c} has fewer than 2 rows")

    test_counts = {c: round_half_up(test_fraction * per_class_positions[c].size) for c in classes}
    target_total = round_half_up(test_fraction * data.n_rows)
    shortfall = target_total - sum(test_counts.values())
    if shortfall != 0:
        majority = max(classes, key=lambda c: per_class_positions[c].size)
        test_counts[majority] += shortfall

    rng = np.random.default_rng(seed)
    test_positions: list[int] = []
    for c in classes:
        positions = per_class_positions[c]
        k = test_counts[c]
        if k <= 0 or k >= positions.size:
            raise DegenerateClass(
                f"class {c}: test count {k} of {positions.size} leaves an empty side"
            )
        chosen = rng.permutation(positions)[:k]
        test_positions.extend(int(i) for i in chosen)

    test_set = set(test_positions)
    train_ids = tuple(data.ids[i] for i in range(data.n_rows) if i not in test_set)
    test_ids = tuple(data.ids[i] for i in sorted(test_positions))
    return SplitAssignment(train_ids=train_ids, test_ids=test_ids, fraction=test_fraction, seed=seed)


def stratified_holdout(y, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-class round-half-up holdout on positions; returns (rest, held_out)."""
    y = np.asarray(y, dtype=np.int64)
    rng = np.random.default_rng(seed)
    held: list[int] = []
    for c in sorted(np.unique(y)):
        positions = np.flatnonzero(y == c)
        k = round_half_up(fraction * positions.size)
        k = min(max(k, 1), positions.size - 1)
        held.extend(int(i) for i in rng.permutation(positions)[:k])
    held_set = set(held)
    rest = np.array([i for i in range(y.size) if i not in held_set], dtype=np.int64)
    return rest, np.array(sorted(held), dtype=np.int64)


def stratified_folds(y, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """k stratified folds as (train_positions, val_positions) pairs."""
    y = np.asarray(y, dtype=np.int64)
    if k < 2:
        raise ValueError("need at least 2 folds")
    rng = np.random.default_rng(seed)
    buckets: list[list[int]] = [[] for _ in range(k)]
    for c in sorted(np.unique(y)):
        positions = rng.permutation(np.flatnonzero(y == c))
        for slot, pos in enumerate(positions):
            buckets[slot % k].append(int(pos))
    folds = []
    everything = set(range(y.size))
    for bucket in buckets:
        val = np.array(sorted(bucket), dtype=np.int64)
        train = np.array(sorted(everything - set(bucket)), dtype=np.int64)
        folds.append((train, val))
    return folds


@dataclass(frozen=True)
class ConfusionMatrix:
    """2x2 counts; rows = true class {0,1}, columns = predicted class {0,1}."""

    counts: tuple[tuple[int, int], tuple[int, int]]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1 or y_true.size == 0:
        raise LengthMismatch(f"got shapes {y_true.shape} and {y_pred.shape}")
    counts = [[0, 0], [0, 0]]
    for t, p in zip(y_true, y_pred):
        counts[int(t)][int(p)] += 1
    return ConfusionMatrix(counts=tuple(tuple(row) for row in counts))


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    per_class: dict[int, ClassMetrics]
    accuracy: float
    macro_f1: float
    weighted_f1: float
    balanced_accuracy: float

    def to_record(self) -> dict:
        return {
            "class0": vars(self.per_class[0]),
            "class1": vars(self.per_class[1]),
            "accuracy": self.accuracy,
            "macro_f1": self.macro_f1,
            "weighted_f1": self.weighted_f1,
            "balanced_accuracy": self.balanced_accuracy,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def _safe_div(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def report(cm: ConfusionMatrix) -> EvalReport:
    """Standard per-class precision/recall/F1 plus the aggregate rates."""
    counts = cm.as_array()
    total = int(counts.sum())
    if total <= 0:
        raise ValueError("empty confusion matrix")
    per_class: dict[int, ClassMetrics] = {}
    for c in (0, 1):
        tp = counts[c, c]
        support = int(counts[c].sum())
        predicted = int(counts[:, c].sum())
        precision = _safe_div(tp, predicted)
        recall = _safe_div(tp, support)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_class[c] = ClassMetrics(precision=precision, recall=recall, f1=f1, support=support)
    accuracy = (counts[0, 0] + counts[1, 1]) / total
    macro_f1 = (per_class[0].f1 + per_class[1].f1) / 2.0
    weighted_f1 = (
        per_class[0].f1 * per_class[0].support + per_class[1].f1 * per_class[1].support
    ) / total
    balanced = (per_class[0].recall + per_class[1].recall) / 2.0
    return EvalReport(
        per_class=per_class,
        accuracy=accuracy,
        macro_f1=macro_f1,
        weighted_f1=weighted_f1,
        balanced_accuracy=balanced,
    )


def balanced_accuracy(y_true, y_pred) -> float:
    return report(confusion(y_true, y_pred)).balanced_accuracy


def format_report(rep: EvalReport, cm: ConfusionMatrix | None = None) -> str:
    """Aligned-column text table in the familiar classification-report layout."""
    lines = [f"{'':>14}{'precision':>10}{'recall':>10}{'f1-score':>10}{'support':>10}", ""]
    total = rep.per_class[0].support + rep.per_class[1].support
    for c in (0, 1):
        m = rep.per_class[c]
        lines.append(f"{c:>14}{m.precision:>10.4f}{m.recall:>10.4f}{m.f1:>10.4f}{m.support:>10}")
    lines.append("")
    lines.append(f"{'accuracy':>14}{'':>20}{rep.accuracy:>10.4f}{total:>10}")
    macro_p = (rep.per_class[0].precision + rep.per_class[1].precision) / 2
    macro_r = (rep.per_class[0].recall + rep.per_class[1].recall) / 2
    lines.append(f"{'macro avg':>14}{macro_p:>10.4f}{macro_r:>10.4f}{rep.macro_f1:>10.4f}{total:>10}")
    weighted_p = (
        rep.per_class[0].precision * rep.per_class[0].support
        + rep.per_class[1].precision * rep.per_class[1].support
    ) / total
    weighted_r = rep.accuracy
    lines.append(
        f"{'weighted avg':>14}{weighted_p:>10.4f}{weighted_r:>10.4f}{rep.weighted_f1:>10.4f}{total:>10}"
    )
    lines.append(f"{'balanced acc':>14}{rep.balanced_accuracy:>10.4f}")
    if cm is not None:
        lines.append("")
        lines.append("confusion matrix (rows=true, cols=pred):")
        arr = cm.as_array()
        lines.append(f"    [[{arr[0, 0]:>4} {arr[0, 1]:>4}]")
        lines.append(f"     [{arr[1, 0]:>4} {arr[1, 1]:>4}]]")
    return "\n".join(lines)
