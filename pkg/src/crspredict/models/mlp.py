"""Single-hidden-layer perceptron with weighted cross-entropy training.

The architecture is fixed to one rectified hidden layer feeding a sigmoid
output; only the hidden width varies (the width sweep selects it by class-0
F1, the project's priority metric). Training is mini-batch SGD with momentum,
optional inverse-prevalence class weighting, L2 weight decay on the weight
matrices (never the biases), and patience-based early stopping that always
returns the best-validation parameters.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, NonFinite
from ..metrics import confusion, report, stratified_folds, stratified_holdout
from .logistic import sigmoid


@dataclass
class MlpModel:
    w1: np.ndarray  # (width, d)
    b1: np.ndarray  # (width,)
    w2: np.ndarray  # (width,)
    b2: float
    reg_lambda: float = 0.0
    class_weights: tuple[float, float] = (1.0, 1.0)

    @property
    def width(self) -> int:
        return self.w1.shape[0]


@dataclass
class TrainTrace:
    train_losses: list[float] = field(default_factory=list)
    val_losses: list[float] = field(default_factory=list)
    val_balanced_accuracies: list[float] = field(default_factory=list)
    stopped_epoch: int = 0
    stop_reason: str = "maxEpochs"  # "earlyStop" | "maxEpochs"


def glorot_init(d: int, width: int, seed: int) -> MlpModel:
    rng = np.random.default_rng(seed)
    lim1 = np.sqrt(6.0 / (d + width))
    lim2 = np.sqrt(6.0 / (width + 1))
    return MlpModel(
        w1=rng.uniform(-lim1, lim1, size=(width, d)),
        b1=np.zeros(width),
        w2=rng.uniform(-lim2, lim2, size=width),
        b2=0.0,
    )


def mlp_forward(model: MlpModel, X) -> np.ndarray:
    """Probability of class 1 per row, strictly inside (0, 1)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != model.w1.shape[1]:
        raise DimensionMismatch(f"model expects {model.w1.shape[1]} features, got {X.shape[1]}")
    hidden = np.maximum(X @ model.w1.T + model.b1, 0.0)
    return sigmoid(hidden @ model.w2 + model.b2)


def mlp_predict(model: MlpModel, X) -> np.ndarray:
    return (mlp_forward(model, X) >= 0.5).astype(np.int64)


def _sample_weights(y: np.ndarray, class_weights) -> tuple[np.ndarray, tuple[float, float]]:
    if class_weights is None:
        pair = (1.0, 1.0)
    elif class_weights == "balanced":
        n1 = int(np.sum(y == 1))
        n0 = y.size - n1
        pair = (y.size / (2.0 * n0), y.size / (2.0 * n1))
    else:
        pair = (float(class_weights[0]), float(class_weights[1]))
    return np.where(y == 1, pair[1], pair[0]), pair


def mlp_loss(model: MlpModel, X, y, sample_weights=None) -> float:
    """Weighted mean cross-entropy plus L2 on both weight matrices."""
    y = np.asarray(y, dtype=np.float64)
    p = mlp_forward(model, X)
    eps = 1e-12
    ce = -(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
    if sample_weights is not None:
        ce = ce * sample_weights
    penalty = model.reg_lambda * (float(np.sum(model.w1 ** 2)) + float(np.sum(model.w2 ** 2)))
    return float(np.mean(ce)) + penalty


def mlp_gradients(model: MlpModel, X, y, sample_weights=None):
    """Analytic gradients of mlp_loss w.r.t. (w1, b1, w2, b2)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m = X.shape[0]
    pre_hidden = X @ model.w1.T + model.b1
    hidden = np.maximum(pre_hidden, 0.0)
    p = sigmoid(hidden @ model.w2 + model.b2)
    delta = (p - y) / m
    if sample_weights is not None:
        delta = delta * sample_weights
    grad_w2 = hidden.T @ delta + 2.0 * model.reg_lambda * model.w2
    grad_b2 = float(np.sum(delta))
    back = np.outer(delta, model.w2) * (pre_hidden > 0.0)
    grad_w1 = back.T @ X + 2.0 * model.reg_lambda * model.w1
    grad_b1 = back.sum(axis=0)
    return grad_w1, grad_b1, grad_w2, grad_b2


def mlp_fit(
    X,
    y,
    width: int = 400,
    reg_lambda: float = 1e-4,
    class_weights=None,
    learning_rate: float = 1e-3,
    momentum: float = 0.9,
    batch_size: int = 32,
    max_epochs: int = 2000,
    patience: int = 20,
    val_fraction: float = 0.15,
    seed: int = 0,
) -> tuple[MlpModel, TrainTrace]:
    """Train with early stopping on a stratified validation slice.

    val_fraction=0 disables the holdout and runs to max_epochs. The returned
    model carries the parameters from the best validation epoch.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise ValueError("both classes must be present in training data")
    if width < 1:
        raise ValueError("width must be >= 1")

    if val_fraction > 0.0:
        train_idx, val_idx = stratified_holdout(y, val_fraction, seed)
        X_train, y_train = X[train_idx], y[train_idx]
        X_val, y_val = X[val_idx], y[val_idx]
    else:
        X_train, y_train = X, y
        X_val = y_val = None

    sw_train, pair = _sample_weights(y_train, class_weights)
    model = glorot_init(X.shape[1], width, seed)
    model.reg_lambda = reg_lambda
    model.class_weights = pair
    sw_val = np.where(y_val == 1, pair[1], pair[0]) if y_val is not None else None

    rng = np.random.default_rng(seed + 1)
    vel = [np.zeros_like(model.w1), np.zeros_like(model.b1), np.zeros_like(model.w2), 0.0]
    trace = TrainTrace()
    best_loss = np.inf
    best_params = None
    since_best = 0

    for epoch in range(1, max_epochs + 1):
        order = rng.permutation(X_train.shape[0])
        for start in range(0, order.size, batch_size):
            batch = order[start : start + batch_size]
            grads = mlp_gradients(model, X_train[batch], y_train[batch], sw_train[batch])
            vel[0] = momentum * vel[0] - learning_rate * grads[0]
            vel[1] = momentum * vel[1] - learning_rate * grads[1]
            vel[2] = momentum * vel[2] - learning_rate * grads[2]
            vel[3] = momentum * vel[3] - learning_rate * grads[3]
            model.w1 = model.w1 + vel[0]
            model.b1 = model.b1 + vel[1]
            model.w2 = model.w2 + vel[2]
            model.b2 = float(model.b2 + vel[3])
        epoch_loss = mlp_loss(model, X_train, y_train, sw_train)
        if not np.isfinite(epoch_loss):
            raise NonFinite("training loss diverged; lower the learning rate")
        trace.train_losses.append(epoch_loss)
        trace.stopped_epoch = epoch

        if X_val is None:
            continue
        val_loss = mlp_loss(model, X_val, y_val, sw_val)
        trace.val_losses.append(val_loss)
        trace.val_balanced_accuracies.append(
            report(confusion(y_val, mlp_predict(model, X_val))).balanced_accuracy
        )
        if val_loss < best_loss - 1e-12:
            best_loss = val_loss
            best_params = (model.w1.copy(), model.b1.copy(), model.w2.copy(), model.b2)
            since_best = 0
        else:
            since_best += 1
            if since_best >= patience:
                trace.stop_reason = "earlyStop"
                break

    if best_params is not None:
        model.w1, model.b1, model.w2, model.b2 = best_params
    return model, trace


def trace_to_csv(trace: TrainTrace) -> str:
    """Comma-separated epoch log: train loss plus validation loss/BA when present."""
    lines = ["epoch,train_loss,val_loss,val_balanced_accuracy"]
    for i, train_loss in enumerate(trace.train_losses):
        val_loss = trace.val_losses[i] if i < len(trace.val_losses) else ""
        val_ba = (
            trace.val_balanced_accuracies[i]
            if i < len(trace.val_balanced_accuracies)
            else ""
        )
        lines.append(f"{i + 1},{train_loss},{val_loss},{val_ba}")
    lines.append(f"# stopped_epoch={trace.stopped_epoch} stop_reason={trace.stop_reason}")
    return "\n".join(lines) + "\n"


@dataclass
class SweepResult:
    widths: list[int]
    metrics: dict[int, dict[str, float]]  # width -> accuracy/weighted_f1/class0_f1/class1_f1
    chosen_width: int


DEFAULT_WIDTH_GRID = [25, 50, 100, 200, 300, 400, 480]


def width_sweep(
    X,
    y,
    widths=None,
    folds: int = 5,
    seed: int = 0,
    **fit_kwargs,
) -> SweepResult:
    """Stratified k-fold sweep over hidden widths on the training split only.

    Selection maximizes class-0 F1; ties go to the smaller width.
    """
    widths = list(DEFAULT_WIDTH_GRID if widths is None else widths)
    if not widths:
        raise ValueError("widths must be nonempty")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    fold_split = stratified_folds(y, folds, seed)
    metrics: dict[int, dict[str, float]] = {}
    for width in widths:
        oof = np.zeros(y.size, dtype=np.int64)
        for train_idx, val_idx in fold_split:
            model, _ = mlp_fit(X[train_idx], y[train_idx], width=width, seed=seed, **fit_kwargs)
            oof[val_idx] = mlp_predict(model, X[val_idx])
        rep = report(confusion(y, oof))
        metrics[width] = {
            "accuracy": rep.accuracy,
            "weighted_f1": rep.weighted_f1,
            "class0_f1": rep.per_class[0].f1,
            "class1_f1": rep.per_class[1].f1,
        }
    chosen = min(widths, key=lambda w: (-metrics[w]["class0_f1"], w))
    return SweepResult(widths=widths, metrics=metrics, chosen_width=chosen)
