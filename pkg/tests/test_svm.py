from __future__ import annotations

import numpy as np
import pytest

from crspredict.errors import DimensionMismatch
from crspredict.models.svm import (
    KernelSpec,
    default_gamma,
    dual_objective,
    kernel_eval,
    kernel_matrix,
    kkt_violation_count,
    svm_decision,
    svm_fit,
    svm_predict,
    svm_predict_proba,
)


def random_feasible_alphas(y_pm, C, count, rng):
    """Sample alpha uniformly in the box, then repair sum(alpha*y)=0 by
    scaling down the class group with the excess mass."""
    n = y_pm.size
    out = np.zeros((count, n))
    pos = y_pm > 0
    for k in range(count):
        alpha = rng.uniform(0, C, size=n)
        for _ in range(50):
            s = float(np.dot(alpha, y_pm))
            if abs(s) < 1e-12:
                break
            group = (pos if s > 0 else ~pos) & (alpha > 0)
            weight = alpha[group].sum()
            if weight <= 0:
                break
            reduction = np.zeros(n)
            reduction[group] = abs(s) * alpha[group] / weight
            alpha = np.clip(alpha - reduction, 0, C)
        out[k] = alpha
    return out


# ----- kernels -------------------------------------------------------------------


def test_kernel_examples():
    rbf = KernelSpec("rbf", gamma=0.5)
    x = np.array([1.0, -2.0, 3.0])
    assert kernel_eval(rbf, x, x) == pytest.approx(1.0)
    linear = KernelSpec("linear")
    assert kernel_eval(linear, np.array([1.0, 2.0]), np.array([3.0, 4.0])) == pytest.approx(11.0)


def test_kernel_symmetry_and_range():
    rng = np.random.default_rng(0)
    rbf = KernelSpec("rbf", gamma=1.3)
    for _ in range(20):
        a, b = rng.normal(size=4), rng.normal(size=4)
        kab = kernel_eval(rbf, a, b)
        assert kab == pytest.approx(kernel_eval(rbf, b, a))
        assert 0.0 < kab <= 1.0


def test_kernel_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        kernel_eval(KernelSpec("linear"), np.ones(2), np.ones(3))


def test_kernel_matrix_matches_pairwise_eval():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(6, 3))
    B = rng.normal(size=(4, 3))
    spec = KernelSpec("rbf", gamma=0.8)
    K = kernel_matrix(spec, A, B)
    for i in range(6):
        for j in range(4):
            assert K[i, j] == pytest.approx(kernel_eval(spec, A[i], B[j]), abs=1e-12)


# ----- closed-form two-point problem ----------------------------------------------


def test_two_symmetric_points_closed_form():
    X = np.array([[-1.0], [1.0]])
    y = np.array([0, 1])
    model = svm_fit(X, y, kernel="linear", C=100.0, tol=1e-4, seed=0)
    # alpha_1 = alpha_2 = 0.5, b = 0, f(x) = x
    assert model.dual_coefs == pytest.approx(np.array([-0.5, 0.5]), abs=1e-3)
    assert model.bias == pytest.approx(0.0, abs=1e-3)
    probe = np.array([[-2.0], [-0.3], [0.7], [3.0]])
    assert svm_decision(model, probe) == pytest.approx(probe.ravel(), abs=5e-3)


def test_midpoint_tie_goes_to_class_one():
    X = np.array([[-1.0], [1.0]])
    model = svm_fit(X, np.array([0, 1]), kernel="linear", C=100.0, seed=0)
    decision = svm_decision(model, np.array([[0.0]]))[0]
    assert abs(decision) < 1e-3
    assert svm_predict(model, np.array([[0.0]]))[0] == 1


def test_duplication_invariance_of_decision_function():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(12, 2))
    y = (X[:, 0] + X[:, 1] > 0).astype(int)
    base = svm_fit(X, y, kernel="linear", C=10.0, seed=1)
    duplicated = svm_fit(np.vstack([X, X, X]), np.tile(y, 3), kernel="linear", C=10.0, seed=1)
    probe = rng.normal(size=(30, 2))
    d1 = svm_decision(base, probe)
    d2 = svm_decision(duplicated, probe)
    assert np.allclose(d1, d2, atol=2e-2)
    confident = np.abs(d1) > 0.1
    assert np.array_equal(d1[confident] >= 0, d2[confident] >= 0)


def test_xor_needs_the_rbf_kernel():
    X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    y = np.array([0, 0, 1, 1])
    rbf = svm_fit(X, y, kernel="rbf", gamma=2.0, C=50.0, seed=0)
    assert np.array_equal(svm_predict(rbf, X), y)
    linear = svm_fit(X, y, kernel="linear", C=50.0, seed=0)
    assert np.mean(svm_predict(linear, X) == y) <= 0.75


def test_scaling_c_keeps_separable_predictions():
    rng = np.random.default_rng(4)
    X = np.vstack([rng.normal(-2, 0.4, size=(10, 2)), rng.normal(2, 0.4, size=(10, 2))])
    y = np.array([0] * 10 + [1] * 10)
    small = svm_fit(X, y, kernel="linear", C=1.0, seed=0)
    large = svm_fit(X, y, kernel="linear", C=100.0, seed=0)
    assert np.array_equal(svm_predict(small, X), svm_predict(large, X))


# ----- KKT and dual optimality ------------------------------------------------------


def test_kkt_and_dual_optimality_random_datasets():
    rng = np.random.default_rng(2024)
    for trial in range(12):
        n = int(rng.integers(4, 13))
        d = int(rng.integers(1, 4))
        X = rng.normal(size=(n, d))
        y = rng.integers(0, 2, n)
        if len(np.unique(y)) < 2:
            y[0] = 1 - y[0]
        C = float(rng.choice([0.5, 1.0, 5.0]))
        tol = 1e-3
        model = svm_fit(X, y, kernel="rbf", C=C, tol=tol, seed=trial)

        y_pm = np.where(y == 1, 1.0, -1.0)
        K = kernel_matrix(model.kernel, X, X)
        K = (K + K.T) / 2.0
        alpha = np.zeros(n)
        decision_no_bias = svm_decision(model, X) - model.bias
        # recover alpha for the retained support vectors
        sv_index = 0
        for i in range(n):
            if sv_index < model.support_vectors.shape[0] and np.allclose(
                X[i], model.support_vectors[sv_index]
            ):
                alpha[i] = abs(model.dual_coefs[sv_index])
                sv_index += 1
        assert sv_index == model.support_vectors.shape[0]

        assert abs(float(np.dot(alpha, y_pm))) < 1e-8
        assert np.all(alpha >= -1e-12) and np.all(alpha <= C + 1e-12)
        assert kkt_violation_count(K, y_pm, alpha, model.bias, C, tol) == 0

        ours = dual_objective(K, y_pm, alpha)
        rivals = random_feasible_alphas(y_pm, C, 200, rng)
        for rival in rivals:
            assert abs(float(np.dot(rival, y_pm))) < 1e-9
            assert ours >= dual_objective(K, y_pm, rival) - 1e-9
        del decision_no_bias


def test_probability_squashing_preserves_predictions():
    rng = np.random.default_rng(31)
    X = rng.normal(size=(30, 3))
    y = (X[:, 0] - X[:, 2] > 0).astype(int)
    model = svm_fit(X, y, kernel="rbf", C=2.0, seed=5)
    probe = rng.normal(size=(40, 3))
    labels = svm_predict(model, probe)
    probs = svm_predict_proba(model, probe)
    assert np.array_equal((probs >= 0.5).astype(int), labels)


def test_default_gamma_heuristic():
    rng = np.random.default_rng(8)
    X = rng.normal(scale=2.0, size=(50, 5))
    assert default_gamma(X) == pytest.approx(1.0 / (5 * X.var()))
    assert default_gamma(np.ones((10, 3))) == 1.0
