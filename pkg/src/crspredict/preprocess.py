"""Feature transforms shared by the linear, kernel, and neural models.

Continuous columns are standardized with train-set statistics; categorical
columns stay as their integer codes unless one-hot expansion is requested.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .schema import FeatureSpec


@dataclass
class FeatureTransform:
    """Fit-once column transform: standardization plus optional one-hot codes."""

    continuous_mask: np.ndarray
    one_hot: bool = False
    code_counts: list[int] = field(default_factory=list)
    means: np.ndarray | None = None
    stds: np.ndarray | None = None

    @classmethod
    def from_schema(cls, schema: list[FeatureSpec], one_hot: bool = False) -> "FeatureTransform":
        mask = np.array([spec.kind == "continuous" for spec in schema], dtype=bool)
        counts = [len(spec.codes) if spec.kind == "categorical" else 0 for spec in schema]
        return cls(continuous_mask=mask, one_hot=one_hot, code_counts=counts)

    @classmethod
    def standardize_all(cls, n_features: int) -> "FeatureTransform":
        return cls(continuous_mask=np.ones(n_features, dtype=bool))

    def fit(self, X: np.ndarray) -> "FeatureTransform":
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] != self.continuous_mask.size:
            raise DimensionMismatch(
                f"expected {self.continuous_mask.size} columns, got {X.shape[1]}"
            )
        self.means = np.zeros(X.shape[1])
        self.stds = np.ones(X.shape[1])
        cont = self.continuous_mask
        self.means[cont] = X[:, cont].mean(axis=0)
        stds = X[:, cont].std(axis=0)
        stds[stds == 0.0] = 1.0
        self.stds[cont] = stds
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if self.means is None:
            raise RuntimeError("transform used before fit")
        if X.shape[1] != self.continuous_mask.size:
            raise DimensionMismatch(
                f"expected {self.continuous_mask.size} columns, got {X.shape[1]}"
            )
        out = (X - self.means) / self.stds
        if not self.one_hot:
            return out
        blocks = []
        for col in range(X.shape[1]):
            if self.continuous_mask[col] or self.code_counts[col] == 0:
                blocks.append(out[:, col : col + 1])
            else:
                k = self.code_counts[col]
                hot = np.zeros((X.shape[0], k))
                codes = X[:, col].astype(np.int64)
                codes = np.clip(codes, 0, k - 1)
                hot[np.arange(X.shape[0]), codes] = 1.0
                blocks.append(hot)
        return np.hstack(blocks)

    def fit_transform(self, X: np.ndarray) -> np.ndarray:
        return self.fit(X).transform(X)
