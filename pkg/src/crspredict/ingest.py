"""Raw cohort loading and the cleaning pipeline.

Cleaning follows a fixed row-drop order so per-reason counts are stable:
non-surgery rows first, then rows without a six-month follow-up, then rows
still containing nulls (blank cells). The null census is taken on the
surgery-restricted subset, before the follow-up filter, so it reflects the
cohort a clinician would see when auditing missingness. The six-month score
exists only long enough to materialize the outcome label; the cleaned output
carries schema features plus the binary target and nothing post-operative.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from statistics import median
from typing import Optional

import numpy as np

from .dataset import LabeledDataset
from .errors import DuplicateId, SchemaMismatch
from .schema import (
    ID_COLUMN,
    SNOT22_BASELINE,
    SNOT22_SIX_MONTH,
    SURGERY_TREATMENT,
    TREATMENT_COLUMN,
    FeatureSpec,
    label_outcome,
)


@dataclass
class RawCohort:
    rows: list[dict[str, str]]
    columns: list[str]
    provenance: str = ""

    def __post_init__(self) -> None:
        for i, row in enumerate(self.rows):
            if set(row.keys()) != set(self.columns):
                raise SchemaMismatch(f"row {i} of {self.provenance or 'cohort'} is not rectangular")

    def save_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=self.columns)
            writer.writeheader()
            writer.writerows(self.rows)


def load_raw_cohort(path: str | Path, provenance: str = "") -> RawCohort:
    """Read a comma-separated cohort file; blank cells are nulls."""
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        columns = list(reader.fieldnames or [])
        rows = [dict(row) for row in reader]
    return RawCohort(rows=rows, columns=columns, provenance=provenance or Path(path).stem)


@dataclass
class CleanReport:
    rows_in: int = 0
    rows_out: int = 0
    dropped_by_reason: dict[str, int] = field(default_factory=dict)
    dropped_columns: list[str] = field(default_factory=list)
    null_census: dict[str, int] = field(default_factory=dict)

    def accounting_holds(self) -> bool:
        return self.rows_in == self.rows_out + sum(self.dropped_by_reason.values())

    def to_json_lines(self) -> str:
        records = [
            {
                "kind": "summary",
                "rows_in": self.rows_in,
                "rows_out": self.rows_out,
                "dropped_by_reason": self.dropped_by_reason,
            }
        ]
        records.extend(
            {"kind": "dropped_column", "name": name} for name in self.dropped_columns
        )
        records.extend(
            {"kind": "null_census", "feature": feat, "count": count}
            for feat, count in sorted(self.null_census.items())
        )
        return "\n".join(json.dumps(r, sort_keys=True) for r in records) + "\n"


def _is_null(value: Optional[str]) -> bool:
    return value is None or value.strip() == ""


def clean_cohort(
    raw: RawCohort,
    schema: list[FeatureSpec],
    drop_columns: Optional[list[str]] = None,
    impute: bool = False,
) -> tuple[LabeledDataset, CleanReport]:
    """Run the full cleaning pipeline on one raw cohort.

    Raises SchemaMismatch if the raw columns do not cover the schema plus the
    treatment and both score columns. With impute=True, rows with nulls are
    filled (median for continuous, most frequent label otherwise) instead of
    dropped; the default keeps the drop behavior.
    """
    drop_columns = list(drop_columns or [])
    names = [spec.name for spec in schema]
    required = set(names) | {TREATMENT_COLUMN, SNOT22_SIX_MONTH}
    missing = sorted(required - set(raw.columns))
    if missing:
        raise SchemaMismatch(f"raw cohort lacks required columns: {missing}")

    report = CleanReport(rows_in=len(raw.rows))
    surgical = [
        row
        for row in raw.rows
        if not _is_null(row.get(TREATMENT_COLUMN))
        and row[TREATMENT_COLUMN].strip().casefold() == SURGERY_TREATMENT.casefold()
    ]
    report.dropped_by_reason["non_surgery"] = len(raw.rows) - len(surgical)

    report.null_census = {
        name: sum(1 for row in surgical if _is_null(row.get(name))) for name in names
    }
    report.null_census = {k: v for k, v in report.null_census.items() if v > 0}

    with_follow_up = [row for row in surgical if not _is_null(row.get(SNOT22_SIX_MONTH))]
    report.dropped_by_reason["no_follow_up"] = len(surgical) - len(with_follow_up)

    if impute:
        _impute_in_place(with_follow_up, schema)
        complete = with_follow_up
        report.dropped_by_reason["null_field"] = 0
    else:
        complete = [
            row for row in with_follow_up if not any(_is_null(row.get(name)) for name in names)
        ]
        report.dropped_by_reason["null_field"] = len(with_follow_up) - len(complete)

    by_name = {spec.name: spec for spec in schema}
    matrix = np.zeros((len(complete), len(names)))
    targets = np.zeros(len(complete), dtype=np.int64)
    ids = []
    for i, row in enumerate(complete):
        for j, name in enumerate(names):
            spec = by_name[name]
            cell = row[name].strip()
            if spec.kind == "continuous":
                matrix[i, j] = float(cell)
            else:
                matrix[i, j] = spec.encode(cell)
        baseline = float(row[SNOT22_BASELINE])
        six_month = float(row[SNOT22_SIX_MONTH])
        targets[i] = label_outcome(baseline, six_month).value
        ids.append(row.get(ID_COLUMN, "").strip() or f"{raw.provenance}-{i:04d}")

    report.dropped_columns = sorted(
        (set(raw.columns) - set(names) - {ID_COLUMN}) | set(drop_columns) & set(raw.columns)
    )
    report.rows_out = len(complete)
    dataset = LabeledDataset(X=matrix, y=targets, columns=list(names), ids=ids)
    return dataset, report


def _impute_in_place(rows: list[dict[str, str]], schema: list[FeatureSpec]) -> None:
    for spec in schema:
        present = [row[spec.name].strip() for row in rows if not _is_null(row.get(spec.name))]
        if not present:
            continue
        if spec.kind == "continuous":
            fill = repr(median(float(v) for v in present))
        else:
            counts: dict[str, int] = {}
            for v in present:
                counts[v] = counts.get(v, 0) + 1
            fill = max(counts, key=lambda k: (counts[k], k))
        for row in rows:
            if _is_null(row.get(spec.name)):
                row[spec.name] = fill


def merge_cohorts(a: LabeledDataset, b: LabeledDataset) -> LabeledDataset:
    """Concatenate two cleaned cohorts with identical schemas and disjoint ids."""
    if a.columns != b.columns:
        raise SchemaMismatch("cohorts have different column schemas")
    overlap = set(a.ids) & set(b.ids)
    if overlap:
        raise DuplicateId(f"ids present in both cohorts: {sorted(overlap)[:5]}")
    return LabeledDataset(
        X=np.vstack([a.X, b.X]),
        y=np.concatenate([a.y, b.y]),
        columns=list(a.columns),
        ids=list(a.ids) + list(b.ids),
    )
