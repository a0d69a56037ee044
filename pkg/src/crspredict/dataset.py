"""Labeled feature-matrix container shared by ingest, models, and evaluation."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SchemaMismatch

TARGET_COLUMN = "TARGET"


@dataclass
class LabeledDataset:
    """Encoded feature matrix with a binary outcome vector and column schema."""

    X: np.ndarray  # (n, d) float64
    y: np.ndarray  # (n,) int64 in {0, 1}
    columns: list[str]
    ids: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2:
            raise ValueError("X must be 2-dimensional")
        if self.X.shape[0] != self.y.shape[0]:
            raise ValueError("X and y row counts differ")
        if self.X.shape[1] != len(self.columns):
            raise ValueError("column names do not match X width")
        if not self.ids:
            self.ids = [str(i) for i in range(self.X.shape[0])]
        if len(self.ids) != self.X.shape[0]:
            raise ValueError("ids do not match row count")

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        """Rows by columns including the target column."""
        return (self.n_rows, self.n_features + 1)

    def prevalence(self) -> float:
        return float(np.mean(self.y == 1)) if self.n_rows else 0.0

    def class_counts(self) -> tuple[int, int]:
        return int(np.sum(self.y == 0)), int(np.sum(self.y == 1))

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise SchemaMismatch(f"column {name!r} not in dataset") from None

    def subset_by_positions(self, positions: np.ndarray | list[int]) -> "LabeledDataset":
        positions = np.asarray(positions, dtype=np.int64)
        return LabeledDataset(
            X=self.X[positions],
            y=self.y[positions],
            columns=list(self.columns),
            ids=[self.ids[int(i)] for i in positions],
        )

    def subset_by_ids(self, wanted: list[str]) -> "LabeledDataset":
        index = {case_id: i for i, case_id in enumerate(self.ids)}
        return self.subset_by_positions([index[w] for w in wanted])

    def save_csv(self, path: str | Path) -> None:
        """Write id, features, and target as a UTF-8 CSV with a header row."""
        path = Path(path)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["CASE_ID", *self.columns, TARGET_COLUMN])
            for i in range(self.n_rows):
                row = [self.ids[i]]
                row.extend(_format_number(v) for v in self.X[i])
                row.append(str(int(self.y[i])))
                writer.writerow(row)

    @classmethod
    def load_csv(cls, path: str | Path) -> "LabeledDataset":
        path = Path(path)
        with path.open("r", newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[0] != "CASE_ID" or header[-1] != TARGET_COLUMN:
                raise SchemaMismatch("expected CASE_ID first and TARGET last in header")
            columns = header[1:-1]
            ids, rows, targets = [], [], []
            for row in reader:
                ids.append(row[0])
                rows.append([float(v) for v in row[1:-1]])
                targets.append(int(row[-1]))
        return cls(
            X=np.asarray(rows, dtype=np.float64),
            y=np.asarray(targets, dtype=np.int64),
            columns=columns,
            ids=ids,
        )


def _format_number(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))
