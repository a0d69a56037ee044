"""Second-level learners: vote panels, leak-free stacking, and AdaBoost.

A panel member is any fitted object with ``predict_proba``/``predict``.
Hard votes break exact ties in favor of a designated member (the MLP by
default); soft votes break an exact 0.5 in favor of class 1, the repo-wide
rule. Stacking trains its logistic meta-learner on out-of-fold posteriors
only, and keeps the fold bookkeeping so the leakage audit can prove that no
row's meta-feature was produced by a model that saw the row in training.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateFold, WeightMismatch
from ..metrics import stratified_folds
from .logistic import LogisticModel, logreg_fit, logreg_predict_proba, sigmoid
from .tree import TreeNode, fit_tree_gini, tree_predict_proba


@dataclass
class VotePanel:
    members: list[tuple[str, object]]  # (name, fitted classifier)
    tie_break_member: str = "mlp"

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("panel needs at least one member")
        names = [name for name, _ in self.members]
        if self.tie_break_member not in names:
            raise ValueError(f"tie-break member {self.tie_break_member!r} not in {names}")

    def member(self, name: str):
        for member_name, clf in self.members:
            if member_name == name:
                return clf
        raise KeyError(name)


def member_votes(panel: VotePanel, X) -> np.ndarray:
    """(M, n) hard labels, one row per member in panel order."""
    return np.stack([np.asarray(clf.predict(X)) for _, clf in panel.members])


def hard_vote(panel: VotePanel, X) -> np.ndarray:
    votes = member_votes(panel, X)
    ones = votes.sum(axis=0)
    zeros = votes.shape[0] - ones
    out = (ones > zeros).astype(np.int64)
    ties = ones == zeros
    if np.any(ties):
        tie_breaker = votes[[n for n, _ in panel.members].index(panel.tie_break_member)]
        out[ties] = tie_breaker[ties]
    return out


def normalize_weights(weights, n_members: int) -> np.ndarray:
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (n_members,):
        raise WeightMismatch(f"need {n_members} weights, got shape {weights.shape}")
    if np.any(weights < 0.0) or weights.sum() <= 0.0:
        raise WeightMismatch("weights must be nonnegative with positive sum")
    return weights / weights.sum()


def soft_vote(panel: VotePanel, weights, X) -> tuple[np.ndarray, np.ndarray]:
    """Weighted convex combination of member posteriors.

    Returns (labels, combined probability of class 1); combined 0.5 exactly
    classifies as 1.
    """
    w = normalize_weights(weights, len(panel.members))
    combined = np.zeros(np.asarray(X).shape[0] if np.asarray(X).ndim == 2 else 1)
    for weight, (_, clf) in zip(w, panel.members):
        combined = combined + weight * np.asarray(clf.predict_proba(X))
    return (combined >= 0.5).astype(np.int64), combined


@dataclass
class StackModel:
    member_names: list[str]
    base_models: list  # refit on the full training data
    meta: LogisticModel
    k: int
    fold_train_positions: list[tuple[int, ...]] = field(default_factory=list)
    fold_val_positions: list[tuple[int, ...]] = field(default_factory=list)
    fold_of_row: np.ndarray | None = None
    n_train_rows: int = 0


def stack_fit(X, y, members: list[tuple[str, object]], k: int = 5, seed: int = 0) -> StackModel:
    """Fit bases out-of-fold, train the logistic meta-learner on those
    posteriors, then refit every base on the full training data for serving.

    members are (name, factory) pairs; the factory builds a fresh unfitted
    classifier each call so no state leaks between folds.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if k < 2:
        raise ValueError("stacking needs k >= 2")
    folds = stratified_folds(y, k, seed)
    for f, (train_idx, val_idx) in enumerate(folds):
        if len(np.unique(y[train_idx])) < 2 or val_idx.size == 0:
            raise DegenerateFold(f"fold {f} lost a class or is empty")

    n = y.size
    meta_X = np.zeros((n, len(members)))
    fold_of_row = np.full(n, -1, dtype=np.int64)
    for f, (train_idx, val_idx) in enumerate(folds):
        fold_of_row[val_idx] = f
        for m, (_, factory) in enumerate(members):
            clf = factory()
            clf.fit(X[train_idx], y[train_idx])
            meta_X[val_idx, m] = np.asarray(clf.predict_proba(X[val_idx]))

    meta = logreg_fit(meta_X, y, penalty="l2", reg_lambda=1.0)

    full_models = []
    for _, factory in members:
        clf = factory()
        clf.fit(X, y)
        full_models.append(clf)

    return StackModel(
        member_names=[name for name, _ in members],
        base_models=full_models,
        meta=meta,
        k=k,
        fold_train_positions=[tuple(int(i) for i in tr) for tr, _ in folds],
        fold_val_positions=[tuple(int(i) for i in va) for _, va in folds],
        fold_of_row=fold_of_row,
        n_train_rows=n,
    )


def stack_meta_features(model: StackModel, X) -> np.ndarray:
    return np.column_stack([np.asarray(clf.predict_proba(X)) for clf in model.base_models])


def stack_predict_proba(model: StackModel, X) -> np.ndarray:
    return logreg_predict_proba(model.meta, stack_meta_features(model, X))


def stack_predict(model: StackModel, X) -> np.ndarray:
    return (stack_predict_proba(model, X) >= 0.5).astype(np.int64)


def leakage_audit(model: StackModel) -> bool:
    """Verify the out-of-fold bookkeeping: every row's meta-feature producer
    trained on a fold that excludes the row, and the folds partition the data.
    """
    n = model.n_train_rows
    seen = np.zeros(n, dtype=np.int64)
    for val in model.fold_val_positions:
        for i in val:
            seen[i] += 1
    if not np.all(seen == 1):
        raise AssertionError("validation folds do not partition the rows")
    for f, (train, val) in enumerate(
        zip(model.fold_train_positions, model.fold_val_positions)
    ):
        train_set = set(train)
        if train_set & set(val):
            raise AssertionError(f"fold {f}: train and validation overlap")
        if set(train) | set(val) != set(range(n)):
            raise AssertionError(f"fold {f}: train+val do not cover the data")
        for i in val:
            if model.fold_of_row[i] != f:
                raise AssertionError(f"row {i}: provenance does not match fold {f}")
            if i in train_set:
                raise AssertionError(f"row {i}: meta-feature produced by a model that saw it")
    return True


@dataclass
class AdaBoostModel:
    stages: list[tuple[TreeNode, float]] = field(default_factory=list)
    weak_depth: int = 1


def adaboost_fit(X, y, n_stages: int = 50, weak_depth: int = 1) -> AdaBoostModel:
    """Stage-wise reweighted fitting of depth-limited trees.

    Stops early on a perfect stage (kept) or an uninformative one with
    weighted error >= 0.5 (discarded). Sample weights are renormalized to
    sum to 1 after every stage.
    """
    if n_stages < 1:
        raise ValueError("need at least one stage")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    n = y.size
    weights = np.full(n, 1.0 / n)
    model = AdaBoostModel(weak_depth=weak_depth)
    for _ in range(n_stages):
        tree = fit_tree_gini(X, y, weights=weights, max_depth=weak_depth, min_leaf=1)
        pred = (tree_predict_proba(tree, X) >= 0.5).astype(np.int64)
        miss = pred != y
        error = float(weights[miss].sum())
        if error >= 0.5:
            break  # uninformative stage, discard and halt
        floored = max(error, 1e-12)
        alpha = 0.5 * np.log((1.0 - floored) / floored)
        model.stages.append((tree, float(alpha)))
        if error == 0.0:
            break  # perfect stage kept, nothing left to reweight
        agree = np.where(miss, -1.0, 1.0)
        weights = weights * np.exp(-alpha * agree)
        weights = weights / weights.sum()
    return model


def adaboost_margin(model: AdaBoostModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    margin = np.zeros(X.shape[0])
    for tree, alpha in model.stages:
        h = np.where(tree_predict_proba(tree, X) >= 0.5, 1.0, -1.0)
        margin += alpha * h
    return margin


def adaboost_predict(model: AdaBoostModel, X) -> np.ndarray:
    return (adaboost_margin(model, X) >= 0.0).astype(np.int64)


def adaboost_predict_proba(model: AdaBoostModel, X) -> np.ndarray:
    return sigmoid(adaboost_margin(model, X))
