"""Second-order gradient-boosted trees for the binary logistic objective.

Each round fits a regression tree to the current gradients g = p - y and
hessians h = p(1 - p); leaves carry -G/(H + lambda) and the learning rate
scales every tree's contribution on top of a log-odds base score. Rounds
stop early when no candidate split has positive gain, or when a supplied
validation set stops improving.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NonFinite
from .logistic import sigmoid
from .tree import TreeNode, fit_tree_boost, tree_predict_scores

DEFAULT_PARAMS = {
    "n_estimators": 200,
    "learning_rate": 0.05,
    "max_depth": 3,
    "subsample": 0.8,
    "colsample_bytree": 1.0,
    "reg_lambda": 1.0,
    "gamma": 0.0,
    "min_leaf": 1,
}


@dataclass
class BoostModel:
    trees: list[TreeNode] = field(default_factory=list)
    learning_rate: float = 0.05
    base_score: float = 0.0  # log-odds of training prevalence
    params: dict = field(default_factory=dict)


def _log_odds(p: float) -> float:
    p = min(max(p, 1e-12), 1.0 - 1e-12)
    return float(np.log(p / (1.0 - p)))


def logistic_loss(y: np.ndarray, scores: np.ndarray) -> float:
    p = sigmoid(scores)
    eps = 1e-12
    return float(-np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps)))


def boost_fit(
    X,
    y,
    n_estimators: int = 200,
    learning_rate: float = 0.05,
    max_depth: int = 3,
    subsample: float = 0.8,
    colsample_bytree: float = 1.0,
    reg_lambda: float = 1.0,
    gamma: float = 0.0,
    min_leaf: int = 1,
    seed: int = 0,
    X_val=None,
    y_val=None,
    patience: int = 10,
    track_train_loss: bool = False,
):
    """Fit the boosted ensemble; returns (model, train_loss_per_round)."""
    if n_estimators < 0:
        raise ValueError("n_estimators must be >= 0")
    if not (0.0 < subsample <= 1.0 and 0.0 < colsample_bytree <= 1.0):
        raise ValueError("subsample and colsample_bytree must be in (0, 1]")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    rng = np.random.default_rng(seed)

    base = _log_odds(float(np.mean(y)))
    scores = np.full(n, base)
    model = BoostModel(
        trees=[],
        learning_rate=learning_rate,
        base_score=base,
        params={
            "n_estimators": n_estimators,
            "learning_rate": learning_rate,
            "max_depth": max_depth,
            "subsample": subsample,
            "colsample_bytree": colsample_bytree,
            "reg_lambda": reg_lambda,
            "gamma": gamma,
            "min_leaf": min_leaf,
        },
    )
    train_losses = [logistic_loss(y, scores)] if track_train_loss else []

    val_scores = None
    best_val = np.inf
    since_best = 0
    if X_val is not None:
        X_val = np.asarray(X_val, dtype=np.float64)
        y_val = np.asarray(y_val, dtype=np.float64)
        val_scores = np.full(X_val.shape[0], base)

    for _ in range(n_estimators):
        p = sigmoid(scores)
        grad = p - y
        hess = p * (1.0 - p)

        if subsample < 1.0:
            rows = rng.choice(n, size=max(2, int(round(subsample * n))), replace=False)
            rows.sort()
        else:
            rows = np.arange(n)
        if colsample_bytree < 1.0:
            cols = rng.choice(d, size=max(1, int(round(colsample_bytree * d))), replace=False)
            cols.sort()
        else:
            cols = None

        tree = fit_tree_boost(
            X[rows],
            grad[rows],
            hess[rows],
            max_depth=max_depth,
            min_leaf=min_leaf,
            reg_lambda=reg_lambda,
            gamma=gamma,
            candidate_columns=cols,
        )
        if tree is None:
            break  # no candidate split has positive gain anywhere
        scores = scores + learning_rate * tree_predict_scores(tree, X)
        if not np.all(np.isfinite(scores)):
            raise NonFinite("boosting scores overflowed")
        model.trees.append(tree)
        if track_train_loss:
            train_losses.append(logistic_loss(y, scores))

        if val_scores is not None:
            val_scores = val_scores + learning_rate * tree_predict_scores(tree, X_val)
            val_loss = logistic_loss(y_val, val_scores)
            if val_loss < best_val - 1e-12:
                best_val = val_loss
                since_best = 0
            else:
                since_best += 1
                if since_best >= patience:
                    break
    return model, train_losses


def boost_raw_scores(model: BoostModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    scores = np.full(X.shape[0], model.base_score)
    for tree in model.trees:
        scores += model.learning_rate * tree_predict_scores(tree, X)
    return scores


def boost_predict_proba(model: BoostModel, X) -> np.ndarray:
    return sigmoid(boost_raw_scores(model, X))


def boost_predict(model: BoostModel, X) -> np.ndarray:
    return (boost_predict_proba(model, X) >= 0.5).astype(np.int64)
