"""Versioned line-delimited model files.

Grammar: UTF-8 JSON records, one per line. The first record is always
``{"record": "header", "format": "crspredict-model", "version": 1,
"kind": <model kind>, ...}``; the remaining records depend on the kind.
Every fitted first-level member serializes as a single file carrying its
feature transform followed by the model parameters, so the serving layer can
reload it without retraining.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .models import ClassifierAdapter
from .models.boosting import BoostModel, boost_predict_proba
from .models.ensemble import AdaBoostModel
from .models.logistic import LogisticModel, logreg_predict_proba
from .models.mlp import MlpModel, mlp_forward
from .models.naive_bayes import NaiveBayesModel, nb_predict_proba
from .models.svm import KernelSpec, SvmModel, svm_predict_proba
from .models.tree import ForestModel, TreeNode, forest_predict_proba
from .preprocess import FeatureTransform

FORMAT = "crspredict-model"
VERSION = 1


def _node_to_dict(node: TreeNode) -> dict:
    out = {"n_rows": node.n_rows, "score": node.score}
    if node.posterior is not None:
        out["posterior"] = [float(v) for v in node.posterior]
    if not node.is_leaf:
        out["feature"] = node.feature
        out["threshold"] = node.threshold
        out["left"] = _node_to_dict(node.left)
        out["right"] = _node_to_dict(node.right)
    return out


def _node_from_dict(doc: dict) -> TreeNode:
    node = TreeNode(n_rows=int(doc.get("n_rows", 0)), score=float(doc.get("score", 0.0)))
    if "posterior" in doc:
        node.posterior = np.asarray(doc["posterior"], dtype=np.float64)
    if "feature" in doc:
        node.feature = int(doc["feature"])
        node.threshold = float(doc["threshold"])
        node.left = _node_from_dict(doc["left"])
        node.right = _node_from_dict(doc["right"])
    return node


def model_records(model) -> tuple[str, list[dict]]:
    """(kind, records) for any supported fitted model."""
    if isinstance(model, LogisticModel):
        return "logistic", [
            {
                "record": "params",
                "weights": model.weights.tolist(),
                "bias": model.bias,
                "penalty": model.penalty,
                "reg_lambda": model.reg_lambda,
            }
        ]
    if isinstance(model, NaiveBayesModel):
        records = [
            {
                "record": "priors",
                "class_log_priors": model.class_log_priors.tolist(),
                "kinds": list(model.kinds),
                "variance_floor": model.variance_floor,
                "alpha": model.alpha,
            }
        ]
        for col, kind in enumerate(model.kinds):
            if kind == "continuous":
                records.append(
                    {
                        "record": "gaussian",
                        "column": col,
                        "means": model.means[:, col].tolist(),
                        "variances": model.variances[:, col].tolist(),
                    }
                )
            else:
                records.append(
                    {
                        "record": "table",
                        "column": col,
                        "log_probs": model.tables[col].tolist(),
                        "unseen": model.unseen_logs[col].tolist(),
                    }
                )
        return "naive_bayes", records
    if isinstance(model, SvmModel):
        records = [
            {
                "record": "config",
                "kernel": model.kernel.name,
                "gamma": model.kernel.gamma,
                "C": model.C,
                "bias": model.bias,
            }
        ]
        for vec, coef in zip(model.support_vectors, model.dual_coefs):
            records.append({"record": "sv", "vector": vec.tolist(), "coef": float(coef)})
        return "svm", records
    if isinstance(model, ForestModel):
        records = [
            {
                "record": "config",
                "n_features_per_split": model.n_features_per_split,
                "seed": model.seed,
            }
        ]
        records += [
            {"record": "tree", "index": i, "nodes": _node_to_dict(t)}
            for i, t in enumerate(model.trees)
        ]
        return "forest", records
    if isinstance(model, BoostModel):
        records = [
            {
                "record": "config",
                "learning_rate": model.learning_rate,
                "base_score": model.base_score,
                "params": model.params,
            }
        ]
        records += [
            {"record": "tree", "index": i, "nodes": _node_to_dict(t)}
            for i, t in enumerate(model.trees)
        ]
        return "boost", records
    if isinstance(model, MlpModel):
        return "mlp", [
            {
                "record": "shape",
                "width": model.width,
                "inputs": model.w1.shape[1],
                "reg_lambda": model.reg_lambda,
                "class_weights": list(model.class_weights),
            },
            {"record": "w1", "values": model.w1.ravel().tolist()},
            {"record": "b1", "values": model.b1.tolist()},
            {"record": "w2", "values": model.w2.tolist()},
            {"record": "b2", "value": model.b2},
        ]
    if isinstance(model, AdaBoostModel):
        records = [{"record": "config", "weak_depth": model.weak_depth}]
        records += [
            {"record": "stage", "index": i, "alpha": alpha, "nodes": _node_to_dict(tree)}
            for i, (tree, alpha) in enumerate(model.stages)
        ]
        return "adaboost", records
    raise TypeError(f"no serialization for {type(model).__name__}")


def model_from_records(kind: str, records: list[dict]):
    if kind == "logistic":
        doc = records[0]
        return LogisticModel(
            weights=np.asarray(doc["weights"], dtype=np.float64),
            bias=float(doc["bias"]),
            penalty=doc["penalty"],
            reg_lambda=float(doc["reg_lambda"]),
        )
    if kind == "naive_bayes":
        head = records[0]
        kinds = tuple(head["kinds"])
        d = len(kinds)
        means = np.zeros((2, d))
        variances = np.ones((2, d))
        tables: dict[int, np.ndarray] = {}
        unseen: dict[int, np.ndarray] = {}
        for rec in records[1:]:
            col = int(rec["column"])
            if rec["record"] == "gaussian":
                means[:, col] = rec["means"]
                variances[:, col] = rec["variances"]
            else:
                tables[col] = np.asarray(rec["log_probs"], dtype=np.float64)
                unseen[col] = np.asarray(rec["unseen"], dtype=np.float64)
        return NaiveBayesModel(
            class_log_priors=np.asarray(head["class_log_priors"], dtype=np.float64),
            kinds=kinds,
            means=means,
            variances=variances,
            tables=tables,
            unseen_logs=unseen,
            variance_floor=float(head["variance_floor"]),
            alpha=float(head["alpha"]),
        )
    if kind == "svm":
        head = records[0]
        svs = [rec for rec in records[1:] if rec["record"] == "sv"]
        vectors = np.asarray([rec["vector"] for rec in svs], dtype=np.float64)
        coefs = np.asarray([rec["coef"] for rec in svs], dtype=np.float64)
        return SvmModel(
            support_vectors=vectors if vectors.size else np.zeros((0, 0)),
            dual_coefs=coefs,
            bias=float(head["bias"]),
            kernel=KernelSpec(head["kernel"], float(head["gamma"])),
            C=float(head["C"]),
        )
    if kind == "forest":
        head = records[0]
        trees = [_node_from_dict(rec["nodes"]) for rec in records[1:]]
        return ForestModel(
            trees=trees,
            n_features_per_split=int(head["n_features_per_split"]),
            seed=int(head["seed"]),
        )
    if kind == "boost":
        head = records[0]
        trees = [_node_from_dict(rec["nodes"]) for rec in records[1:]]
        return BoostModel(
            trees=trees,
            learning_rate=float(head["learning_rate"]),
            base_score=float(head["base_score"]),
            params=dict(head["params"]),
        )
    if kind == "mlp":
        head = records[0]
        by_name = {rec["record"]: rec for rec in records[1:]}
        width, inputs = int(head["width"]), int(head["inputs"])
        model = MlpModel(
            w1=np.asarray(by_name["w1"]["values"], dtype=np.float64).reshape(width, inputs),
            b1=np.asarray(by_name["b1"]["values"], dtype=np.float64),
            w2=np.asarray(by_name["w2"]["values"], dtype=np.float64),
            b2=float(by_name["b2"]["value"]),
            reg_lambda=float(head["reg_lambda"]),
            class_weights=tuple(head["class_weights"]),
        )
        return model
    if kind == "adaboost":
        head = records[0]
        model = AdaBoostModel(weak_depth=int(head["weak_depth"]))
        model.stages = [
            (_node_from_dict(rec["nodes"]), float(rec["alpha"])) for rec in records[1:]
        ]
        return model
    raise ValueError(f"unknown model kind {kind!r}")


PROBA_FNS = {
    "logistic": logreg_predict_proba,
    "naive_bayes": nb_predict_proba,
    "svm": svm_predict_proba,
    "forest": forest_predict_proba,
    "boost": boost_predict_proba,
    "mlp": mlp_forward,
}


def _transform_record(transform: FeatureTransform | None) -> dict:
    if transform is None:
        return {"record": "transform", "none": True}
    return {
        "record": "transform",
        "none": False,
        "continuous_mask": transform.continuous_mask.astype(int).tolist(),
        "one_hot": transform.one_hot,
        "code_counts": list(transform.code_counts),
        "means": None if transform.means is None else transform.means.tolist(),
        "stds": None if transform.stds is None else transform.stds.tolist(),
    }


def _transform_from_record(rec: dict) -> FeatureTransform | None:
    if rec.get("none"):
        return None
    t = FeatureTransform(
        continuous_mask=np.asarray(rec["continuous_mask"], dtype=bool),
        one_hot=bool(rec["one_hot"]),
        code_counts=list(rec["code_counts"]),
    )
    if rec.get("means") is not None:
        t.means = np.asarray(rec["means"], dtype=np.float64)
        t.stds = np.asarray(rec["stds"], dtype=np.float64)
    return t


def save_member(path: str | Path, name: str, model, transform: FeatureTransform | None) -> None:
    kind, records = model_records(model)
    header = {
        "record": "header",
        "format": FORMAT,
        "version": VERSION,
        "kind": "member",
        "model": kind,
        "name": name,
    }
    lines = [header, _transform_record(transform), *records]
    with Path(path).open("w", encoding="utf-8") as fh:
        for rec in lines:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_member(path: str | Path) -> ClassifierAdapter:
    with Path(path).open("r", encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    header = records[0]
    if header.get("format") != FORMAT:
        raise ValueError(f"{path}: not a {FORMAT} file")
    if header.get("version") != VERSION:
        raise ValueError(f"{path}: unsupported version {header.get('version')}")
    transform = _transform_from_record(records[1])
    kind = header["model"]
    model = model_from_records(kind, records[2:])
    adapter = ClassifierAdapter(
        name=header["name"], fit_fn=None, proba_fn=PROBA_FNS[kind], transform=transform
    )
    adapter.model = model
    adapter.model_kind = kind
    return adapter
