"""Registry of named fitted models plus the serving-time decision threshold.

Serving never mutates models: the registry is loaded once and only the
decision threshold is adjustable (admin surface), which implements threshold
tuning without retraining. The registry directory holds one model file per
member, the SHAP background sample, a global-importance snapshot, and a
manifest tying them together.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SchemaMismatch
from .explain import ShapResult, shap_values
from .models import ClassifierAdapter
from .persist import load_member, save_member
from .schema import SNOT22_BASELINE, FeatureSpec, PatientRecord, validate_record

MANIFEST_NAME = "registry.json"


@dataclass
class ModelRegistry:
    members: dict[str, ClassifierAdapter]
    columns: list[str]
    schema: list[FeatureSpec]
    active: str = "mlp"
    threshold: float = 0.5
    tie_break: str = "mlp"
    background: np.ndarray | None = None
    global_importance: list[dict] = field(default_factory=list)
    explain_budget: int = 400

    def __post_init__(self) -> None:
        self.set_threshold(self.threshold)
        if self.active not in self.members:
            raise ValueError(f"active model {self.active!r} is not a registered member")

    def set_threshold(self, threshold: float) -> None:
        threshold = float(threshold)
        if not 0.0 < threshold < 1.0:
            raise ValueError(f"threshold {threshold} outside (0, 1)")
        self.threshold = threshold

    def active_member(self) -> ClassifierAdapter:
        return self.members[self.active]

    def row_from_values(self, values: dict) -> np.ndarray:
        try:
            return np.array([float(values[c]) for c in self.columns], dtype=np.float64)
        except KeyError as missing:
            raise SchemaMismatch(f"missing feature {missing.args[0]!r}") from None

    def validate_values(self, values: dict) -> list[str]:
        known = {k: float(v) for k, v in values.items() if isinstance(v, (int, float))}
        bad_types = [
            f"{k}: not numeric" for k, v in values.items() if not isinstance(v, (int, float))
        ]
        record = PatientRecord(
            id="adhoc",
            values=known,
            snot22_baseline=float(known.get(SNOT22_BASELINE, -1.0)),
        )
        return bad_types + validate_record(record, self.schema)

    def predict_values(self, values: dict, threshold: float | None = None) -> dict:
        tau = self.threshold if threshold is None else float(threshold)
        row = self.row_from_values(values)
        probability = float(self.active_member().predict_proba(row.reshape(1, -1))[0])
        return {
            "probability": probability,
            "decision": 1 if probability >= tau else 0,
            "model": self.active,
            "threshold": tau,
        }

    def explain_values(self, values: dict, seed: int = 0) -> tuple[ShapResult, list[dict]]:
        if self.background is None:
            raise RuntimeError("registry has no background sample for explanations")
        row = self.row_from_values(values)
        member = self.active_member()
        result = shap_values(
            lambda X: member.predict_proba(X),
            row,
            self.background,
            sampling_budget=self.explain_budget if len(self.columns) > 12 else None,
            seed=seed,
        )
        ranked = sorted(
            (
                {
                    "feature": name,
                    "value": float(row[i]),
                    "phi": float(result.attributions[i]),
                }
                for i, name in enumerate(self.columns)
            ),
            key=lambda item: -abs(item["phi"]),
        )
        return result, ranked

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for name, member in self.members.items():
            save_member(directory / f"{name}.model.jsonl", name, member.model, member._transform)
        if self.background is not None:
            np.savetxt(directory / "background.csv", self.background, delimiter=",")
        manifest = {
            "members": sorted(self.members),
            "columns": self.columns,
            "active": self.active,
            "threshold": self.threshold,
            "tie_break": self.tie_break,
            "explain_budget": self.explain_budget,
            "global_importance": self.global_importance,
        }
        (directory / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True))

    @classmethod
    def load(cls, directory: str | Path, schema: list[FeatureSpec]) -> "ModelRegistry":
        directory = Path(directory)
        manifest = json.loads((directory / MANIFEST_NAME).read_text())
        members = {
            name: load_member(directory / f"{name}.model.jsonl") for name in manifest["members"]
        }
        background_path = directory / "background.csv"
        background = (
            np.loadtxt(background_path, delimiter=",") if background_path.exists() else None
        )
        if background is not None and background.ndim == 1:
            background = background.reshape(1, -1)
        return cls(
            members=members,
            columns=list(manifest["columns"]),
            schema=schema,
            active=manifest["active"],
            threshold=float(manifest["threshold"]),
            tie_break=manifest.get("tie_break", "mlp"),
            background=background,
            global_importance=list(manifest.get("global_importance", [])),
            explain_budget=int(manifest.get("explain_budget", 400)),
        )
