"""First-level classifiers and the second-level aggregators.

Every classifier in this package follows the same minimal surface:
``fit(X, y)`` on encoded matrices, ``predict_proba(X)`` returning the
probability of class 1 per row, and ``predict(X)`` returning hard labels
with the repo-wide tie rule (probability exactly 0.5 goes to class 1).
"""

from __future__ import annotations

import numpy as np


class ClassifierAdapter:
    """Uniform fit/predict wrapper pairing a model's functions with a transform."""

    def __init__(self, name, fit_fn, proba_fn, transform=None):
        self.name = name
        self._fit_fn = fit_fn
        self._proba_fn = proba_fn
        self._transform = transform
        self.model = None

    def fit(self, X, y):
        if self._transform is not None:
            X = self._transform.fit_transform(X)
        self.model = self._fit_fn(X, np.asarray(y))
        return self

    def predict_proba(self, X):
        if self.model is None:
            raise RuntimeError(f"{self.name}: predict before fit")
        if self._transform is not None:
            X = self._transform.transform(X)
        return self._proba_fn(self.model, np.asarray(X, dtype=np.float64))

    def predict(self, X):
        return (self.predict_proba(X) >= 0.5).astype(np.int64)
