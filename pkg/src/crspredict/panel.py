"""Expert-panel benchmarking: difficulty tiers, panel aggregation, reports.

Benchmark cases are ranked by prediction uncertainty |p - 0.5| with case-id
tie-breaks, then partitioned into hard (most uncertain), easy (most certain),
and medium (the rank-centered window of what remains). Panel decisions take
the majority call; an exact vote tie goes to the class with the larger summed
five-point confidence, and a tie on that too falls back to class 0, the
conservative default of not recommending surgery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import IncompleteCoverage, MalformedConfidence, TooFewCases
from .metrics import EvalReport, confusion, report

TIERS = ("hard", "medium", "easy")


@dataclass(frozen=True)
class ExpertLabel:
    rater_id: str
    case_id: str
    call: int  # 0 | 1
    confidence: int  # 1..5
    timestamp: float = 0.0
    revision: int = 1

    def __post_init__(self) -> None:
        if self.call not in (0, 1):
            raise ValueError(f"call must be 0 or 1, got {self.call}")
        if not 1 <= int(self.confidence) <= 5:
            raise MalformedConfidence(f"confidence {self.confidence} outside 1..5")


@dataclass
class BenchmarkSubset:
    hard: list[str]
    medium: list[str]
    easy: list[str]
    k: int
    probabilities: dict[str, float] = field(default_factory=dict)

    def all_cases(self) -> list[str]:
        return self.hard + self.medium + self.easy

    def tier_of(self, case_id: str) -> str:
        for tier in TIERS:
            if case_id in getattr(self, tier):
                return tier
        raise KeyError(case_id)

    def class_ratio_flag(self, truth: dict[str, int], limit: float = 0.10) -> bool:
        """True when subset prevalence drifts more than `limit` from the pool."""
        subset_prev = float(np.mean([truth[c] for c in self.all_cases()]))
        pool_prev = float(np.mean(list(truth.values())))
        return abs(subset_prev - pool_prev) > limit


def stratify_by_uncertainty(probabilities: dict[str, float], k: int) -> BenchmarkSubset:
    """Partition 3k cases into difficulty tiers by |p - 0.5| rank."""
    if len(probabilities) < 3 * k:
        raise TooFewCases(f"need at least {3 * k} cases, got {len(probabilities)}")
    ranked = sorted(probabilities, key=lambda c: (abs(probabilities[c] - 0.5), c))
    hard = ranked[:k]
    easy = ranked[-k:]
    remaining = ranked[k:-k]
    start = (len(remaining) - k) // 2
    medium = remaining[start : start + k]
    return BenchmarkSubset(
        hard=hard, medium=medium, easy=easy, k=k, probabilities=dict(probabilities)
    )


@dataclass(frozen=True)
class PanelDecision:
    case_id: str
    votes: tuple[int, int]  # (count for 0, count for 1)
    decision: int
    method: str  # "majority" | "confidenceTieBreak" | "deepTieRule"


def latest_labels(labels: Iterable[ExpertLabel]) -> list[ExpertLabel]:
    """Resolve revisions: keep the highest-revision label per rater."""
    newest: dict[str, ExpertLabel] = {}
    for label in labels:
        held = newest.get(label.rater_id)
        if held is None or label.revision > held.revision:
            newest[label.rater_id] = label
    return list(newest.values())


def panel_decide(labels: Iterable[ExpertLabel]) -> PanelDecision:
    current = latest_labels(labels)
    if not current:
        raise ValueError("panel_decide needs at least one label")
    case_id = current[0].case_id
    count1 = sum(1 for lab in current if lab.call == 1)
    count0 = len(current) - count1
    if count1 != count0:
        return PanelDecision(
            case_id=case_id,
            votes=(count0, count1),
            decision=1 if count1 > count0 else 0,
            method="majority",
        )
    conf1 = sum(lab.confidence for lab in current if lab.call == 1)
    conf0 = sum(lab.confidence for lab in current if lab.call == 0)
    if conf1 != conf0:
        return PanelDecision(
            case_id=case_id,
            votes=(count0, count1),
            decision=1 if conf1 > conf0 else 0,
            method="confidenceTieBreak",
        )
    return PanelDecision(case_id=case_id, votes=(count0, count1), decision=0, method="deepTieRule")


@dataclass
class TierAccuracy:
    per_rater: dict[str, dict[str, float]]
    pooled: dict[str, float]


def tier_accuracy(
    rater_calls: dict[str, dict[str, int]],
    truth: dict[str, int],
    subset: BenchmarkSubset,
) -> TierAccuracy:
    """Per-rater and pooled accuracy within each difficulty tier.

    Pooled accuracy for a tier is the mean over raters of that rater's tier
    accuracy. Raises IncompleteCoverage if any rater misses a subset case.
    """
    per_rater: dict[str, dict[str, float]] = {}
    for rater, calls in rater_calls.items():
        missing = [c for c in subset.all_cases() if c not in calls]
        if missing:
            raise IncompleteCoverage(f"rater {rater} missing calls for {missing[:5]}")
        per_rater[rater] = {
            tier: float(
                np.mean([1.0 if calls[c] == truth[c] else 0.0 for c in getattr(subset, tier)])
            )
            for tier in TIERS
        }
    pooled = {
        tier: float(np.mean([per_rater[r][tier] for r in per_rater])) for tier in TIERS
    }
    return TierAccuracy(per_rater=per_rater, pooled=pooled)


def rater_report(
    rater_calls: dict[str, dict[str, int]], truth: dict[str, int]
) -> dict[str, EvalReport]:
    """Standard classification report per rater over the cases they called."""
    out = {}
    for rater, calls in sorted(rater_calls.items()):
        cases = sorted(calls)
        y_true = [truth[c] for c in cases]
        y_pred = [calls[c] for c in cases]
        out[rater] = report(confusion(y_true, y_pred))
    return out


def panel_calls(
    labels_by_case: dict[str, list[ExpertLabel]]
) -> dict[str, int]:
    """Aggregate a full label set into one panel call per case."""
    return {case: panel_decide(labels).decision for case, labels in labels_by_case.items()}


LABEL_CSV_HEADER = "rater_id,case_id,call,confidence,revision,timestamp"


def export_labels_csv(labels: Iterable[ExpertLabel]) -> str:
    """Comma-separated label table; the same grammar load_labels_csv consumes,
    so third-party reader studies can round-trip."""
    lines = [LABEL_CSV_HEADER]
    for lab in labels:
        lines.append(
            f"{lab.rater_id},{lab.case_id},{lab.call},{lab.confidence},"
            f"{lab.revision},{lab.timestamp}"
        )
    return "\n".join(lines) + "\n"


def load_labels_csv(text: str) -> list[ExpertLabel]:
    lines = [line for line in text.strip().splitlines() if line]
    if not lines or lines[0] != LABEL_CSV_HEADER:
        raise ValueError("label table must start with the canonical header")
    out = []
    for line in lines[1:]:
        rater_id, case_id, call, confidence, revision, timestamp = line.split(",")
        out.append(
            ExpertLabel(
                rater_id=rater_id,
                case_id=case_id,
                call=int(call),
                confidence=int(confidence),
                revision=int(revision),
                timestamp=float(timestamp),
            )
        )
    return out
