"""Regularized logistic regression trained by full-batch gradient descent.

Objective is the summed negative log-likelihood plus a penalty:
``-sum_i w_i [y_i log p_i + (1-y_i) log(1-p_i)] + lambda * R(w)`` with
R the half squared norm (l2) or the l1 norm, handled by a proximal
soft-threshold step. Optional per-class loss weights mitigate imbalance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, NonFinite


def sigmoid(z):
    """Numerically stable logistic function, elementwise."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass
class LogisticModel:
    weights: np.ndarray
    bias: float
    penalty: str = "l2"
    reg_lambda: float = 0.0
    losses: list[float] = field(default_factory=list, repr=False)


def _sample_weights(y: np.ndarray, class_weights) -> np.ndarray:
    if class_weights is None:
        return np.ones_like(y, dtype=np.float64)
    if class_weights == "balanced":
        n = y.size
        n1 = int(np.sum(y == 1))
        n0 = n - n1
        class_weights = {0: n / (2.0 * n0), 1: n / (2.0 * n1)}
    return np.where(y == 1, class_weights[1], class_weights[0]).astype(np.float64)


def logreg_loss(weights, bias, X, y, penalty="l2", reg_lambda=0.0, sample_weights=None):
    z = X @ weights + bias
    p = sigmoid(z)
    eps = 1e-12
    nll = -(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
    if sample_weights is not None:
        nll = nll * sample_weights
    total = float(np.sum(nll))
    if penalty == "l2":
        total += reg_lambda * 0.5 * float(np.dot(weights, weights))
    else:
        total += reg_lambda * float(np.sum(np.abs(weights)))
    return total


def logreg_gradient(weights, bias, X, y, penalty="l2", reg_lambda=0.0, sample_weights=None):
    """Gradient of the summed objective; l1 contributes its subgradient sign(w)."""
    resid = sigmoid(X @ weights + bias) - y
    if sample_weights is not None:
        resid = resid * sample_weights
    grad_w = X.T @ resid
    grad_b = float(np.sum(resid))
    if penalty == "l2":
        grad_w = grad_w + reg_lambda * weights
    else:
        grad_w = grad_w + reg_lambda * np.sign(weights)
    return grad_w, grad_b


def logreg_fit(
    X,
    y,
    penalty: str = "l2",
    reg_lambda: float = 0.0,
    learning_rate: float | None = None,
    momentum: float = 0.9,
    max_epochs: int = 2000,
    tol: float = 1e-9,
    class_weights=None,
) -> LogisticModel:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if penalty not in ("l1", "l2"):
        raise ValueError(f"penalty must be l1 or l2, got {penalty!r}")
    n, d = X.shape
    if learning_rate is None:
        learning_rate = 1.0 / n
    sw = _sample_weights(y.astype(np.int64), class_weights)

    weights = np.zeros(d)
    bias = 0.0
    vel_w = np.zeros(d)
    vel_b = 0.0
    losses = []
    prev = np.inf
    for _ in range(max_epochs):
        if penalty == "l2":
            grad_w, grad_b = logreg_gradient(weights, bias, X, y, "l2", reg_lambda, sw)
        else:
            # proximal step: smooth part only, then soft-threshold
            grad_w, grad_b = logreg_gradient(weights, bias, X, y, "l2", 0.0, sw)
        vel_w = momentum * vel_w - learning_rate * grad_w
        vel_b = momentum * vel_b - learning_rate * grad_b
        weights = weights + vel_w
        bias = bias + vel_b
        if penalty == "l1":
            shrink = learning_rate * reg_lambda
            weights = np.sign(weights) * np.maximum(np.abs(weights) - shrink, 0.0)
        loss = logreg_loss(weights, bias, X, y, penalty, reg_lambda, sw)
        if not np.isfinite(loss):
            raise NonFinite("logistic loss diverged; lower the learning rate")
        losses.append(loss)
        if abs(prev - loss) < tol:
            break
        prev = loss
    return LogisticModel(
        weights=weights, bias=float(bias), penalty=penalty, reg_lambda=reg_lambda, losses=losses
    )


def logreg_predict_proba(model: LogisticModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != model.weights.size:
        raise DimensionMismatch(f"model has {model.weights.size} weights, row has {X.shape[1]}")
    return sigmoid(X @ model.weights + model.bias)


def logreg_predict(model: LogisticModel, X) -> np.ndarray:
    return (logreg_predict_proba(model, X) >= 0.5).astype(np.int64)
