"""CART-style decision trees and bagged random forests.

Trees grow greedily: at each node the best split maximizes either the
weighted Gini impurity decrease (classification mode) or the second-order
gain with leaf regularization (boosting mode). Thresholds sit at midpoints
of consecutive distinct sorted values; gain ties resolve to the lowest
feature index and lowest threshold, which keeps growth deterministic and
lets brute-force enumeration reproduce every split exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .. import kernels


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    posterior: Optional[np.ndarray] = None  # (2,) class frequencies at leaves (gini mode)
    score: float = 0.0  # leaf weight (boost mode)
    n_rows: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def gini_impurity(labels, weights=None) -> float:
    """1 - sum_k p_k^2 over the label distribution; 0 for a pure node."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        raise ValueError("gini of an empty label set")
    if weights is None:
        weights = np.ones(labels.size)
    weights = np.asarray(weights, dtype=np.float64)
    total = weights.sum()
    p1 = float(weights[labels == 1].sum() / total)
    p0 = 1.0 - p1
    return 1.0 - p1 * p1 - p0 * p0


def best_split(
    X: np.ndarray,
    candidate_features,
    mode: str,
    labels=None,
    weights=None,
    grad=None,
    hess=None,
    min_leaf: int = 1,
    reg_lambda: float = 1.0,
    gamma: float = 0.0,
):
    """Best (feature, threshold, gain) over the candidates, or None.

    mode "gini" scores weighted impurity decrease; mode "boost" scores the
    second-order gain. Returns None when no candidate split has positive gain.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    if n < 2 * min_leaf or n < 2:
        return None
    if mode == "gini":
        labels = np.asarray(labels, dtype=np.float64)
        weights = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    elif mode == "boost":
        grad = np.asarray(grad, dtype=np.float64)
        hess = np.asarray(hess, dtype=np.float64)
    else:
        raise ValueError(f"unknown split mode {mode!r}")

    best = None
    for f in sorted(int(f) for f in candidate_features):
        order = np.argsort(X[:, f], kind="stable")
        values = np.ascontiguousarray(X[order, f])
        if mode == "boost":
            pos, gain = kernels.boost_split_scan(
                values,
                np.ascontiguousarray(grad[order]),
                np.ascontiguousarray(hess[order]),
                float(reg_lambda),
                float(gamma),
                int(min_leaf),
            )
        else:
            pos, gain = kernels.gini_split_scan(
                values,
                np.ascontiguousarray(labels[order]),
                np.ascontiguousarray(weights[order]),
                int(min_leaf),
            )
        if pos < 0:
            continue
        threshold = (values[pos] + values[pos + 1]) / 2.0
        if best is None or gain > best[2]:
            best = (f, float(threshold), float(gain))
    return best


def _leaf_posterior(labels: np.ndarray, weights: np.ndarray) -> np.ndarray:
    total = weights.sum()
    w1 = float(weights[labels == 1].sum())
    return np.array([(total - w1) / total, w1 / total])


def fit_tree_gini(
    X,
    y,
    weights=None,
    max_depth: Optional[int] = None,
    min_leaf: int = 2,
    max_features: Optional[int] = None,
    feature_rng: Optional[np.random.Generator] = None,
) -> TreeNode:
    """Grow a classification tree; leaves carry weighted class frequencies."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    weights = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    depth_cap = np.inf if max_depth is None else max_depth

    def grow(idx: np.ndarray, depth: int) -> TreeNode:
        node = TreeNode(n_rows=idx.size)
        sub_y = y[idx]
        sub_w = weights[idx]
        node.posterior = _leaf_posterior(sub_y, sub_w)
        if depth >= depth_cap or idx.size < 2 * min_leaf or len(np.unique(sub_y)) < 2:
            return node
        if max_features is not None and max_features < d:
            candidates = feature_rng.choice(d, size=max_features, replace=False)
        else:
            candidates = range(d)
        found = best_split(
            X[idx], candidates, "gini", labels=sub_y, weights=sub_w, min_leaf=min_leaf
        )
        if found is None:
            return node
        f, threshold, _ = found
        mask = X[idx, f] <= threshold
        node.feature = f
        node.threshold = threshold
        node.left = grow(idx[mask], depth + 1)
        node.right = grow(idx[~mask], depth + 1)
        return node

    return grow(np.arange(n), 0)


def fit_tree_boost(
    X,
    grad,
    hess,
    max_depth: int = 3,
    min_leaf: int = 1,
    reg_lambda: float = 1.0,
    gamma: float = 0.0,
    candidate_columns=None,
) -> Optional[TreeNode]:
    """Grow a regression tree on gradients; leaves carry -G/(H+lambda).

    Returns None when even the root has no positive-gain split, which the
    boosting loop treats as its convergence signal.
    """
    X = np.asarray(X, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    hess = np.asarray(hess, dtype=np.float64)
    n, d = X.shape
    columns = list(range(d)) if candidate_columns is None else sorted(candidate_columns)

    def leaf_score(idx: np.ndarray) -> float:
        g = float(grad[idx].sum())
        h = float(hess[idx].sum())
        return -g / (h + reg_lambda)

    def grow(idx: np.ndarray, depth: int) -> TreeNode:
        node = TreeNode(n_rows=idx.size, score=leaf_score(idx))
        if depth >= max_depth or idx.size < 2 * min_leaf:
            return node
        found = best_split(
            X[idx],
            columns,
            "boost",
            grad=grad[idx],
            hess=hess[idx],
            min_leaf=min_leaf,
            reg_lambda=reg_lambda,
            gamma=gamma,
        )
        if found is None:
            return node
        f, threshold, _ = found
        mask = X[idx, f] <= threshold
        node.feature = f
        node.threshold = threshold
        node.left = grow(idx[mask], depth + 1)
        node.right = grow(idx[~mask], depth + 1)
        return node

    root_probe = best_split(
        X, columns, "boost", grad=grad, hess=hess,
        min_leaf=min_leaf, reg_lambda=reg_lambda, gamma=gamma,
    )
    if root_probe is None:
        return None
    return grow(np.arange(n), 0)


def tree_apply(root: TreeNode, x: np.ndarray) -> TreeNode:
    node = root
    while not node.is_leaf:
        node = node.left if x[node.feature] <= node.threshold else node.right
    return node


def tree_predict_scores(root: TreeNode, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return np.array([tree_apply(root, row).score for row in X])


def tree_predict_proba(root: TreeNode, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return np.array([tree_apply(root, row).posterior[1] for row in X])


def tree_leaves(root: TreeNode) -> list[TreeNode]:
    if root.is_leaf:
        return [root]
    return tree_leaves(root.left) + tree_leaves(root.right)


def tree_depth(root: TreeNode) -> int:
    if root.is_leaf:
        return 0
    return 1 + max(tree_depth(root.left), tree_depth(root.right))


@dataclass
class ForestModel:
    trees: list[TreeNode] = field(default_factory=list)
    n_features_per_split: int = 0
    seed: int = 0


def forest_fit(
    X,
    y,
    n_trees: int = 200,
    max_features: Optional[int] = None,
    max_depth: Optional[int] = None,
    min_leaf: int = 2,
    seed: int = 0,
    bootstrap: bool = True,
) -> ForestModel:
    """Bag n_trees classification trees with per-split feature subsampling."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n, d = X.shape
    if n_trees < 1:
        raise ValueError("need at least one tree")
    m = int(np.ceil(np.sqrt(d))) if max_features is None else int(max_features)
    m = min(max(m, 1), d)
    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(np.random.SeedSequence([seed, t]))
        rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        trees.append(
            fit_tree_gini(
                X[rows],
                y[rows],
                max_depth=max_depth,
                min_leaf=min_leaf,
                max_features=m,
                feature_rng=rng,
            )
        )
    return ForestModel(trees=trees, n_features_per_split=m, seed=seed)


def forest_predict_proba(model: ForestModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    acc = np.zeros(X.shape[0])
    for tree in model.trees:
        acc += tree_predict_proba(tree, X)
    return acc / len(model.trees)


def forest_predict(model: ForestModel, X) -> np.ndarray:
    return (forest_predict_proba(model, X) >= 0.5).astype(np.int64)
