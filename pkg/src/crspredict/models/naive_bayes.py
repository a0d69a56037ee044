"""Naive Bayes with Gaussian conditionals for continuous features and
Laplace-smoothed frequency tables for integer-coded categoricals.

Posteriors accumulate in the log domain; the two class log-scores are
normalized with a stable log-sum-exp so predict_proba always sums to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateClass

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass
class NaiveBayesModel:
    class_log_priors: np.ndarray  # (2,)
    kinds: tuple[str, ...]  # "continuous" | "categorical" per column
    means: np.ndarray  # (2, d); zeros where categorical
    variances: np.ndarray  # (2, d); ones where categorical
    tables: dict[int, np.ndarray]  # column -> (2, n_codes) log-probabilities
    unseen_logs: dict[int, np.ndarray]  # column -> (2,) log-prob for codes beyond the table
    variance_floor: float
    alpha: float


def nb_fit(
    X,
    y,
    kinds,
    code_counts=None,
    variance_floor: float = 1e-9,
    alpha: float = 1.0,
) -> NaiveBayesModel:
    """Estimate priors and per-feature conditionals from the training set.

    kinds gives "continuous" or "categorical" per column; code_counts the
    declared dictionary size per categorical column (defaults to observed
    max code + 1). Laplace smoothing keeps every declared code representable,
    so an unseen category is never an error after fit.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    kinds = tuple(kinds)
    if len(kinds) != d:
        raise ValueError("kinds must name every column")
    counts = np.array([np.sum(y == 0), np.sum(y == 1)], dtype=np.float64)
    if np.any(counts < 2):
        raise DegenerateClass("need at least 2 rows per class to fit conditionals")
    class_log_priors = np.log(counts / n)

    means = np.zeros((2, d))
    variances = np.ones((2, d))
    tables: dict[int, np.ndarray] = {}
    unseen_logs: dict[int, np.ndarray] = {}
    for col in range(d):
        column = X[:, col]
        if kinds[col] == "continuous":
            for c in (0, 1):
                vals = column[y == c]
                means[c, col] = vals.mean()
                variances[c, col] = max(float(vals.var()), variance_floor)
        else:
            observed_k = int(column.max()) + 1 if n else 1
            k = observed_k if code_counts is None else max(int(code_counts[col]), observed_k)
            table = np.zeros((2, k))
            unseen = np.zeros(2)
            for c in (0, 1):
                vals = column[y == c].astype(np.int64)
                freq = np.bincount(vals, minlength=k).astype(np.float64)
                table[c] = np.log((freq + alpha) / (freq.sum() + alpha * k))
                unseen[c] = np.log(alpha) - np.log(freq.sum() + alpha * (k + 1))
            tables[col] = table
            unseen_logs[col] = unseen
    return NaiveBayesModel(
        class_log_priors=class_log_priors,
        kinds=kinds,
        means=means,
        variances=variances,
        tables=tables,
        unseen_logs=unseen_logs,
        variance_floor=variance_floor,
        alpha=alpha,
    )


def _log_likelihoods(model: NaiveBayesModel, X: np.ndarray) -> np.ndarray:
    n, d = X.shape
    scores = np.tile(model.class_log_priors, (n, 1))
    for col in range(d):
        column = X[:, col]
        if model.kinds[col] == "continuous":
            for c in (0, 1):
                var = model.variances[c, col]
                scores[:, c] += -0.5 * (
                    LOG_2PI + np.log(var) + (column - model.means[c, col]) ** 2 / var
                )
        else:
            table = model.tables[col]
            k = table.shape[1]
            codes = column.astype(np.int64)
            inside = (codes >= 0) & (codes < k)
            for c in (0, 1):
                fallback = float(model.unseen_logs[col][c])
                scores[:, c] += np.where(inside, table[c][np.clip(codes, 0, k - 1)], fallback)
    return scores


def nb_predict_proba(model: NaiveBayesModel, X) -> np.ndarray:
    """Posterior probability of class 1 per row."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    scores = _log_likelihoods(model, X)
    top = scores.max(axis=1, keepdims=True)
    norm = np.exp(scores - top)
    return norm[:, 1] / norm.sum(axis=1)


def nb_predict(model: NaiveBayesModel, X) -> np.ndarray:
    return (nb_predict_proba(model, X) >= 0.5).astype(np.int64)
