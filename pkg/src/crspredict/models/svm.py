"""Soft-margin SVM trained by sequential two-coefficient dual optimization.

The inner pass lives in the kernels package (compiled or fallback); this
module owns kernel evaluation, the pass loop with its random partner draws,
the KKT-based convergence check, and the retained-support-vector model.
Labels are mapped 0 -> -1, 1 -> +1 for the dual; a decision value of exactly
zero classifies as 1, the repo-wide tie rule. Probabilities are a plain
logistic squashing of the decision value and are not calibrated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import DimensionMismatch, NoConvergence
from .logistic import sigmoid


@dataclass(frozen=True)
class KernelSpec:
    name: str  # "linear" | "rbf"
    gamma: float = 1.0


def kernel_eval(kernel: KernelSpec, x1, x2) -> float:
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if x1.shape != x2.shape:
        raise DimensionMismatch(f"kernel arguments differ in shape: {x1.shape} vs {x2.shape}")
    if kernel.name == "linear":
        return float(np.dot(x1, x2))
    diff = x1 - x2
    return float(np.exp(-kernel.gamma * np.dot(diff, diff)))


def kernel_matrix(kernel: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if kernel.name == "linear":
        return A @ B.T
    sq_a = np.sum(A * A, axis=1)[:, None]
    sq_b = np.sum(B * B, axis=1)[None, :]
    d2 = np.maximum(sq_a + sq_b - 2.0 * (A @ B.T), 0.0)
    return np.exp(-kernel.gamma * d2)


def default_gamma(X: np.ndarray) -> float:
    """1 / (featureCount * feature variance); 1.0 when variance degenerates."""
    var = float(np.asarray(X, dtype=np.float64).var())
    if var <= 0.0:
        return 1.0
    return 1.0 / (X.shape[1] * var)


@dataclass
class SvmModel:
    support_vectors: np.ndarray  # rows with alpha > 0
    dual_coefs: np.ndarray  # alpha_i * y_i
    bias: float
    kernel: KernelSpec
    C: float


def dual_objective(K: np.ndarray, y_pm: np.ndarray, alpha: np.ndarray) -> float:
    """W(alpha) = sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij."""
    v = alpha * y_pm
    return float(np.sum(alpha) - 0.5 * v @ K @ v)


def kkt_violation_count(K, y_pm, alpha, bias, C, tol) -> int:
    f = K @ (alpha * y_pm) + bias
    margins = y_pm * f
    lower_band = alpha < 1e-8
    upper_band = alpha > C - 1e-8
    interior = ~lower_band & ~upper_band
    violations = 0
    violations += int(np.sum(lower_band & (margins < 1.0 - tol)))
    violations += int(np.sum(interior & (np.abs(margins - 1.0) > tol)))
    violations += int(np.sum(upper_band & (margins > 1.0 + tol)))
    return violations


def svm_fit(
    X,
    y,
    kernel: str = "rbf",
    C: float = 1.0,
    tol: float = 1e-3,
    gamma: float | None = None,
    seed: int = 0,
    max_stalled_passes: int | None = None,
) -> SvmModel:
    """Fit by simplified SMO with random second-coordinate selection.

    Convergence means a full pass changes nothing and no KKT condition is
    violated beyond tol. Raises NoConvergence once 10*n consecutive passes
    (overridable) make no progress while violations remain.
    """
    X = np.asarray(X, dtype=np.float64)
    y01 = np.asarray(y, dtype=np.int64)
    if len(np.unique(y01)) < 2:
        raise ValueError("both classes must be present")
    n = X.shape[0]
    y_pm = np.where(y01 == 1, 1.0, -1.0)
    spec = KernelSpec(kernel, default_gamma(X) if gamma is None else gamma)
    K = kernel_matrix(spec, X, X)
    K = (K + K.T) / 2.0  # enforce exact symmetry for the pass kernel

    alpha = np.zeros(n)
    bias = 0.0
    err = -y_pm.copy()  # f(x) - y with all-zero alpha and zero bias
    rng = np.random.default_rng(seed)
    stalled = 0
    budget = (10 * n) if max_stalled_passes is None else max_stalled_passes
    while True:
        partner = rng.integers(0, n - 1, size=n)
        partner = partner + (partner >= np.arange(n))  # uniform over j != i
        changed, bias = kernels.smo_pass(K, y_pm, alpha, err, bias, float(C), float(tol), partner)
        if changed > 0:
            stalled = 0
            continue
        if kkt_violation_count(K, y_pm, alpha, bias, C, tol) == 0:
            break
        stalled += 1
        if stalled > budget:
            raise NoConvergence(
                f"SMO stalled for {stalled} passes with KKT violations remaining; "
                f"check C={C} and tol={tol}"
            )

    keep = alpha > 1e-10
    return SvmModel(
        support_vectors=X[keep].copy(),
        dual_coefs=(alpha * y_pm)[keep].copy(),
        bias=float(bias),
        kernel=spec,
        C=float(C),
    )


def svm_decision(model: SvmModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if model.support_vectors.size and X.shape[1] != model.support_vectors.shape[1]:
        raise DimensionMismatch(
            f"model expects {model.support_vectors.shape[1]} features, got {X.shape[1]}"
        )
    if model.support_vectors.size == 0:
        return np.full(X.shape[0], model.bias)
    K = kernel_matrix(model.kernel, X, model.support_vectors)
    return K @ model.dual_coefs + model.bias


def svm_predict(model: SvmModel, X) -> np.ndarray:
    return (svm_decision(model, X) >= 0.0).astype(np.int64)


def svm_predict_proba(model: SvmModel, X) -> np.ndarray:
    """Monotone squashing of the margin; uncalibrated but sign-preserving."""
    return sigmoid(svm_decision(model, X))
