"""Member roster and training orchestration for the six first-level models.

The roster is configuration, not code: each entry names a builder that
assembles a fresh classifier (transform + model) from hyperparameters. The
boosted-tree defaults mirror the tuned values used throughout the project:
colsample 1.0, learning rate 0.05, depth 3, 200 rounds, subsample 0.8.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .models import ClassifierAdapter
from .models.boosting import boost_fit, boost_predict_proba
from .models.logistic import logreg_fit, logreg_predict_proba
from .models.mlp import mlp_fit, mlp_forward
from .models.naive_bayes import nb_fit, nb_predict_proba
from .models.svm import svm_fit, svm_predict_proba
from .models.tree import forest_fit, forest_predict_proba
from .preprocess import FeatureTransform
from .schema import FeatureSpec

MEMBER_NAMES = ["lr", "svm", "rf", "nb", "mlp", "xgb"]

DEFAULT_MODEL_PARAMS: dict[str, dict] = {
    "lr": {"penalty": "l2", "reg_lambda": 1.0, "class_weights": "balanced", "max_epochs": 800},
    "nb": {"variance_floor": 1e-9, "alpha": 1.0},
    "svm": {"kernel": "rbf", "C": 1.0, "tol": 1e-3},
    "rf": {"n_trees": 200, "min_leaf": 2},
    "mlp": {
        "width": 400,
        "reg_lambda": 1e-4,
        "class_weights": "balanced",
        "learning_rate": 1e-3,
        "momentum": 0.9,
        "batch_size": 32,
        "max_epochs": 200,
        "patience": 20,
        "val_fraction": 0.15,
    },
    "xgb": {
        "n_estimators": 200,
        "learning_rate": 0.05,
        "max_depth": 3,
        "subsample": 0.8,
        "colsample_bytree": 1.0,
        "reg_lambda": 1.0,
    },
}


def build_member(
    name: str, schema: list[FeatureSpec], params: dict | None = None, seed: int = 0
) -> ClassifierAdapter:
    """Fresh unfitted classifier for one roster entry."""
    merged = dict(DEFAULT_MODEL_PARAMS.get(name, {}))
    merged.update(params or {})
    kinds = [spec.kind for spec in schema]
    code_counts = [len(spec.codes) if spec.kind == "categorical" else 0 for spec in schema]
    d = len(schema)

    if name == "lr":
        one_hot = bool(merged.pop("one_hot", False))
        transform = FeatureTransform.from_schema(schema, one_hot=one_hot)
        return ClassifierAdapter(
            "lr", lambda X, y: logreg_fit(X, y, **merged), logreg_predict_proba, transform
        )
    if name == "nb":
        return ClassifierAdapter(
            "nb",
            lambda X, y: nb_fit(X, y, kinds=kinds, code_counts=code_counts, **merged),
            nb_predict_proba,
            None,
        )
    if name == "svm":
        return ClassifierAdapter(
            "svm",
            lambda X, y: svm_fit(X, y, seed=seed, **merged),
            svm_predict_proba,
            FeatureTransform.standardize_all(d),
        )
    if name == "rf":
        return ClassifierAdapter(
            "rf", lambda X, y: forest_fit(X, y, seed=seed, **merged), forest_predict_proba, None
        )
    if name == "mlp":
        return ClassifierAdapter(
            "mlp",
            lambda X, y: mlp_fit(X, y, seed=seed, **merged)[0],
            mlp_forward,
            FeatureTransform.standardize_all(d),
        )
    if name == "xgb":
        return ClassifierAdapter(
            "xgb",
            lambda X, y: boost_fit(X, y, seed=seed, **merged)[0],
            boost_predict_proba,
            None,
        )
    raise ValueError(f"unknown member {name!r}")


def member_factory(
    name: str, schema: list[FeatureSpec], params: dict | None = None, seed: int = 0
) -> Callable[[], ClassifierAdapter]:
    return lambda: build_member(name, schema, params, seed)


def train_members(
    X: np.ndarray,
    y: np.ndarray,
    schema: list[FeatureSpec],
    names: list[str] | None = None,
    params_by_name: dict[str, dict] | None = None,
    seed: int = 0,
) -> dict[str, ClassifierAdapter]:
    """Fit every requested roster member on the same training matrix."""
    names = list(names or MEMBER_NAMES)
    params_by_name = params_by_name or {}
    fitted = {}
    for name in names:
        member = build_member(name, schema, params_by_name.get(name), seed=seed)
        member.fit(X, y)
        fitted[name] = member
    return fitted
