"""Clinical data model: feature dictionary, record validation, outcome labeling.

The feature schema ships as a declarative JSON file (``data/cohort_schema.json``)
and is the single source of truth for column names, categorical code
dictionaries, and continuous ranges. Grammar, one object per feature::

    {"name": "SEX", "kind": "categorical", "codes": [["Female", 0], ["Male", 1]]}
    {"name": "AGE", "kind": "continuous",  "range": [18, 90]}

Codes are listed in encoding order and must be consecutive integers starting
at 0. Text lookup trims whitespace and case-folds, so "female " encodes like
"Female". The outcome label is a pure threshold on the baseline-minus-six-month
score change: improvement of at least ``MCID_POINTS`` marks class 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import MissingFollowUp, UnknownLabel

MCID_POINTS = 8.9
# Scores move in 0.1-point steps, so deltas are decimal quantities; the guard
# keeps a true decimal 8.9 on the inclusive side despite binary rounding
# (30 - 21.1 computes to 8.8999999999999986).
_MCID_GUARD = 1e-9

SNOT22_RANGE = (0.0, 110.0)
SNOT22_BASELINE = "SNOT22_BLN_TOTAL"
SNOT22_SIX_MONTH = "SNOT22_6MO_TOTAL"
TREATMENT_COLUMN = "TREATMENT"
SURGERY_TREATMENT = "Sinus surgery"
ID_COLUMN = "CASE_ID"


def _normalize(label: str) -> str:
    return label.strip().casefold()


@dataclass(frozen=True)
class FeatureSpec:
    """One predictor column: its kind plus codes or range."""

    name: str
    kind: str  # "continuous" | "categorical"
    encoding: tuple[tuple[str, int], ...] = ()
    value_range: Optional[tuple[float, float]] = None
    _lookup: dict[str, int] = field(init=False, repr=False, compare=False, default_factory=dict)
    _reverse: dict[int, str] = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in ("continuous", "categorical"):
            raise ValueError(f"feature {self.name!r}: unknown kind {self.kind!r}")
        if self.kind == "categorical":
            if len(self.encoding) < 2:
                raise ValueError(f"feature {self.name!r}: needs at least 2 labels")
            codes = [code for _, code in self.encoding]
            if codes != list(range(len(codes))):
                raise ValueError(
                    f"feature {self.name!r}: codes must be consecutive from 0, got {codes}"
                )
            for label, code in self.encoding:
                key = _normalize(label)
                if key in self._lookup:
                    raise ValueError(f"feature {self.name!r}: duplicate label {label!r}")
                self._lookup[key] = code
                self._reverse[code] = label
        else:
            if self.value_range is None:
                raise ValueError(f"feature {self.name!r}: continuous feature needs a range")
            lo, hi = self.value_range
            if not lo < hi:
                raise ValueError(f"feature {self.name!r}: empty range [{lo}, {hi}]")

    @property
    def codes(self) -> list[int]:
        return [code for _, code in self.encoding]

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.encoding]

    def encode(self, text_label: str) -> int:
        if self.kind != "categorical":
            raise ValueError(f"feature {self.name!r} is not categorical")
        key = _normalize(text_label)
        if key not in self._lookup:
            raise UnknownLabel(self.name, text_label)
        return self._lookup[key]

    def decode(self, code: int) -> str:
        if code not in self._reverse:
            raise UnknownLabel(self.name, str(code))
        return self._reverse[code]

    def check_value(self, value: float) -> Optional[str]:
        """Return a violation message for an encoded value, or None if it conforms."""
        if self.kind == "continuous":
            lo, hi = self.value_range  # type: ignore[misc]
            if not (lo <= value <= hi):
                return f"{self.name}: value {value} out of range [{lo}, {hi}]"
        else:
            if value != int(value) or int(value) not in self._reverse:
                return f"{self.name}: code {value} not in dictionary"
        return None


@dataclass(frozen=True)
class OutcomeLabel:
    """Binary surgery-benefit label plus the score change that produced it."""

    value: int
    delta: float


@dataclass
class PatientRecord:
    """One surgical patient's encoded preoperative values."""

    id: str
    values: dict[str, float]
    snot22_baseline: float
    snot22_six_month: Optional[float] = None


def encode_categorical(spec: FeatureSpec, text_label: str) -> int:
    """Map a text label to its integer code; raises UnknownLabel on a miss."""
    return spec.encode(text_label)


def decode_categorical(spec: FeatureSpec, code: int) -> str:
    return spec.decode(code)


def label_outcome(baseline: float, six_month: Optional[float]) -> OutcomeLabel:
    """Label one patient from the baseline and six-month scores.

    delta = baseline - sixMonth, so positive delta means improvement (lower
    scores are better). Class 1 iff delta >= MCID_POINTS, boundary inclusive.
    """
    if six_month is None:
        raise MissingFollowUp("six-month score absent; row cannot be labeled")
    lo, hi = SNOT22_RANGE
    for name, score in (("baseline", baseline), ("six-month", six_month)):
        if not (lo <= score <= hi):
            raise ValueError(f"{name} score {score} outside [{lo}, {hi}]")
    delta = baseline - six_month
    return OutcomeLabel(value=1 if delta >= MCID_POINTS - _MCID_GUARD else 0, delta=delta)


def validate_record(record: PatientRecord, schema: list[FeatureSpec]) -> list[str]:
    """Collect every violation in a record; empty list means the record is ok."""
    violations = []
    by_name = {spec.name: spec for spec in schema}
    for name, spec in by_name.items():
        if name == SNOT22_BASELINE:
            continue
        if name not in record.values:
            violations.append(f"{name}: missing")
            continue
        problem = spec.check_value(record.values[name])
        if problem:
            violations.append(problem)
    baseline_spec = by_name.get(SNOT22_BASELINE)
    if baseline_spec is not None:
        problem = baseline_spec.check_value(record.snot22_baseline)
        if problem:
            violations.append(problem)
    for name in record.values:
        if name not in by_name:
            violations.append(f"{name}: not in schema")
    return violations


def _spec_from_entry(entry: dict) -> FeatureSpec:
    if entry["kind"] == "categorical":
        return FeatureSpec(
            name=entry["name"],
            kind="categorical",
            encoding=tuple((label, int(code)) for label, code in entry["codes"]),
        )
    return FeatureSpec(
        name=entry["name"],
        kind="continuous",
        value_range=(float(entry["range"][0]), float(entry["range"][1])),
    )


def load_schema(path: Optional[str | Path] = None) -> list[FeatureSpec]:
    """Load the feature schema from a JSON file (packaged default when no path)."""
    if path is None:
        text = resources.files("crspredict.data").joinpath("cohort_schema.json").read_text()
    else:
        text = Path(path).read_text()
    doc = json.loads(text)
    return [_spec_from_entry(entry) for entry in doc["features"]]


def feature_names(schema: list[FeatureSpec]) -> list[str]:
    return [spec.name for spec in schema]
