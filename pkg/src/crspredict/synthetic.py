"""Schema-faithful synthetic cohorts with a planted, tunable signal.

The private study data cannot ship, so desk-scale verification runs on
cohorts built here. Class labels are assigned first (exact prevalence), then
features are drawn with class-conditional shifts scaled by signalStrength:
class-1 rows carry stochastically higher baseline symptom and imaging burden,
a higher polyp/allergy rate, and a lower prior-surgery rate. Six-month scores
are then constructed to realize each row's label under the improvement
threshold. With signalStrength 0 every feature is class-independent, so any
downstream importance should vanish.

paper-shaped fixtures reproduce the published cleaning arithmetic: cohort
sizes, surgery counts, follow-up losses, and per-feature null tallies that
shrink to the documented cleaned dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import RawCohort
from .schema import (
    ID_COLUMN,
    SNOT22_SIX_MONTH,
    SURGERY_TREATMENT,
    TREATMENT_COLUMN,
    FeatureSpec,
)

# class-independent marginals for the categorical features (probability per code)
BASE_MARGINALS = {
    "SEX": [0.52, 0.48],
    "RACE": [0.75, 0.10, 0.05, 0.02, 0.02, 0.03, 0.03],
    "ETHNICITY": [0.88, 0.12],
    "EDUCATION": [0.08, 0.28, 0.22, 0.12, 0.18, 0.12],
    "HOUSEHOLD_INCOME": [0.18, 0.26, 0.22, 0.16, 0.18],
    "INSURANCE": [0.30, 0.22, 0.28, 0.04, 0.16],
    "SMOKER": [0.60, 0.30, 0.10],
    "ALCOHOL": [0.35, 0.45, 0.20],
    "ALLERGY_TESTING": [0.55, 0.45],
    "PREVIOUS_SURGERY": [0.62, 0.38],
    "CRS_POLYPS": [0.60, 0.40],
    "SEPT_DEV": [0.65, 0.35],
    "DIABETES": [0.88, 0.12],
    "COPD": [0.92, 0.08],
    "ASA_INTOLERANCE": [0.93, 0.07],
    "OSA_HISTORY": [0.82, 0.18],
    "GERD": [0.70, 0.30],
    "AFS": [0.94, 0.06],
    "ASTHMA": [0.65, 0.35],
    "FIBROMYALGIA": [0.93, 0.07],
    "DEPRESSION": [0.80, 0.20],
    "MIGRAINE": [0.85, 0.15],
    "IMMUNODEFICIENCY": [0.95, 0.05],
    "CYSTIC_FIBROSIS": [0.98, 0.02],
    "AUTOIMMUNE_DISEASE": [0.92, 0.08],
    "STEROID_USE": [0.30, 0.35, 0.25, 0.10],
}

# (mean, sd, lo, hi, class-1 shift at signal 1, class-0 shift at signal 1)
CONTINUOUS_PARAMS = {
    "SNOT22_BLN_TOTAL": (52.0, 13.0, 15.0, 105.0, +16.0, -8.0),
    "AGE": (51.0, 14.0, 18.0, 90.0, 0.0, 0.0),
    "BLN_CT_TOTAL": (13.0, 4.0, 0.0, 24.0, +3.5, -3.5),
    "BLN_ENDO_TOTAL": (9.0, 3.2, 0.0, 20.0, +1.8, -1.8),
}

# P(yes) shift per unit signal for the planted binary drivers
BINARY_SIGNAL = {
    "CRS_POLYPS": +0.18,
    "ALLERGY_TESTING": +0.12,
    "PREVIOUS_SURGERY": -0.12,
}

MCID_INT_DELTA = 9  # smallest integer change at or above the 8.9 threshold


@dataclass(frozen=True)
class SyntheticSpec:
    n: int
    prevalence: float
    signal_strength: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.prevalence < 1.0:
            raise ValueError("prevalence must be strictly between 0 and 1")
        if self.n < 2:
            raise ValueError("need at least 2 rows")
        if self.signal_strength < 0.0:
            raise ValueError("signalStrength must be >= 0")


def _truncated_normal(rng, n, mean, sd, lo, hi):
    out = rng.normal(mean, sd, size=n)
    for _ in range(64):
        bad = (out < lo) | (out > hi)
        if not np.any(bad):
            break
        out[bad] = rng.normal(mean, sd, size=int(bad.sum()))
    return np.clip(out, lo, hi)


def _draw_rows(
    rng: np.random.Generator,
    labels: np.ndarray,
    schema: list[FeatureSpec],
    signal: float,
) -> list[dict[str, str]]:
    n = labels.size
    values: dict[str, np.ndarray] = {}
    for spec in schema:
        if spec.kind == "continuous":
            mean, sd, lo, hi, up, down = CONTINUOUS_PARAMS[spec.name]
            shift = np.where(labels == 1, signal * up, signal * down)
            values[spec.name] = np.rint(_truncated_normal(rng, n, mean, sd, lo, hi) + 0.0 + shift)
            values[spec.name] = np.clip(values[spec.name], lo, hi)
        else:
            probs = np.asarray(BASE_MARGINALS[spec.name], dtype=np.float64)
            if spec.name in BINARY_SIGNAL:
                delta = BINARY_SIGNAL[spec.name] * signal
                p_yes = np.clip(
                    probs[1] + np.where(labels == 1, delta, -delta), 0.02, 0.98
                )
                codes = (rng.random(n) < p_yes).astype(np.int64)
            else:
                codes = rng.choice(len(probs), size=n, p=probs / probs.sum())
            values[spec.name] = codes

    baseline = values["SNOT22_BLN_TOTAL"]
    u = rng.random(n)
    six_month = np.zeros(n)
    for i in range(n):
        b = baseline[i]
        if labels[i] == 1:
            hi_delta = min(40.0, b)
            delta = MCID_INT_DELTA + np.floor(u[i] * (hi_delta - MCID_INT_DELTA + 1.0))
        else:
            lo_delta = max(-12.0, b - 110.0)
            hi_delta = min(8.0, b)
            delta = lo_delta + np.floor(u[i] * (hi_delta - lo_delta + 1.0))
            delta = min(delta, hi_delta)
        six_month[i] = b - delta

    by_name = {spec.name: spec for spec in schema}
    rows = []
    for i in range(n):
        row: dict[str, str] = {}
        for spec in schema:
            v = values[spec.name][i]
            if spec.kind == "continuous":
                row[spec.name] = str(int(v))
            else:
                row[spec.name] = by_name[spec.name].decode(int(v))
        row[SNOT22_SIX_MONTH] = str(int(six_month[i]))
        rows.append(row)
    return rows


def generate_synthetic(spec: SyntheticSpec, schema: list[FeatureSpec]) -> RawCohort:
    """Deterministic surgical cohort with exact planted prevalence."""
    rng = np.random.default_rng(spec.seed)
    k1 = int(round(spec.n * spec.prevalence))
    labels = np.zeros(spec.n, dtype=np.int64)
    labels[:k1] = 1
    labels = rng.permutation(labels)

    rows = _draw_rows(rng, labels, schema, spec.signal_strength)
    for i, row in enumerate(rows):
        row[ID_COLUMN] = f"S{i:04d}"
        row[TREATMENT_COLUMN] = SURGERY_TREATMENT
    columns = [ID_COLUMN] + [s.name for s in schema] + [TREATMENT_COLUMN, SNOT22_SIX_MONTH]
    ordered = [{c: row[c] for c in columns} for row in rows]
    return RawCohort(rows=ordered, columns=columns, provenance=f"synthetic-{spec.seed}")


# published cleaning arithmetic for the two study cohorts
COHORT_SHAPES = {
    "2R01": {
        "total": 791,
        "surgical": 604,
        "no_follow_up": 217,
        "null_counts": {
            "AGE": 1,
            "RACE": 1,
            "EDUCATION": 10,
            "HOUSEHOLD_INCOME": 7,
            "SMOKER": 4,
            "ALCOHOL": 5,
            "DIABETES": 1,
            "BLN_CT_TOTAL": 2,
            "BLN_ENDO_TOTAL": 3,
            "SNOT22_BLN_TOTAL": 1,
        },
        "null_rows": 16,
        "class1_rows": 300,
        "extra_columns": [
            "HUV_BLN_TOTAL", "HUV_6MO_TOTAL", "SF6D_BLN", "SF6D_6MO", "VISIT_DATE",
            "ENROLL_SITE", "SURGEON_ID", "SURGERY_DATE", "MED_THERAPY_COURSE",
            "ANTIBIOTIC_COURSES", "ORAL_STEROID_COURSES", "PRIOR_VISITS",
            "INSURANCE_NOTES", "ZIPCODE", "HEIGHT_CM", "WEIGHT_KG",
            "FOLLOWUP_CALLS", "DATA_ENTRY_CLERK",
        ],
    },
    "3R01": {
        "total": 354,
        "surgical": 266,
        "no_follow_up": 100,
        "null_counts": {
            "RACE": 2,
            "EDUCATION": 3,
            "HOUSEHOLD_INCOME": 1,
            "OSA_HISTORY": 3,
            "ALCOHOL": 3,
            "BLN_ENDO_TOTAL": 3,
            "SNOT22_BLN_TOTAL": 3,
        },
        "null_rows": 13,
        "class1_rows": 123,
        "extra_columns": [
            "HUV_BLN_TOTAL", "HUV_6MO_TOTAL", "VISIT_DATE", "ENROLL_SITE",
            "SURGERY_DATE", "HEIGHT_CM", "WEIGHT_KG",
        ],
    },
}

DEFAULT_DROP_COLUMNS = sorted(set(COHORT_SHAPES["2R01"]["extra_columns"]))


def paper_shaped_cohort(tag: str, schema: list[FeatureSpec], seed: int = 104) -> RawCohort:
    """A raw cohort whose cleaning bookkeeping lands on the published numbers."""
    if tag not in COHORT_SHAPES:
        raise ValueError(f"unknown cohort tag {tag!r}")
    shape = COHORT_SHAPES[tag]
    rng = np.random.default_rng([seed, len(tag), ord(tag[0])])
    total = shape["total"]

    surgical_idx = np.sort(rng.choice(total, size=shape["surgical"], replace=False))
    surgical_set = set(int(i) for i in surgical_idx)
    no_follow = set(
        int(i) for i in rng.choice(surgical_idx, size=shape["no_follow_up"], replace=False)
    )
    with_follow = [i for i in surgical_idx if int(i) not in no_follow]
    victims = [int(i) for i in rng.choice(with_follow, size=shape["null_rows"], replace=False)]
    survivors = [i for i in with_follow if int(i) not in set(victims)]

    labels = np.zeros(total, dtype=np.int64)
    survivor_order = rng.permutation(len(survivors))
    for rank, pos in enumerate(survivor_order):
        labels[survivors[pos]] = 1 if rank < shape["class1_rows"] else 0
    rest = [i for i in range(total) if i not in set(survivors)]
    labels[rest] = (rng.random(len(rest)) < 0.8).astype(np.int64)

    rows = _draw_rows(rng, labels, schema, signal=1.0)

    # null placement: cycle each feature's tally over the victim rows
    victim_cursor = 0
    for feature, count in shape["null_counts"].items():
        for _ in range(count):
            rows[victims[victim_cursor % len(victims)]][feature] = ""
            victim_cursor += 1

    for i in no_follow:
        rows[i][SNOT22_SIX_MONTH] = ""

    junk_fill = {
        "VISIT_DATE": "2017-06-15", "SURGERY_DATE": "2017-08-01", "ENROLL_SITE": "site-03",
        "SURGEON_ID": "SG-12", "DATA_ENTRY_CLERK": "clerk-2", "INSURANCE_NOTES": "reviewed",
    }
    for i, row in enumerate(rows):
        row[ID_COLUMN] = f"{tag}-{i:04d}"
        row[TREATMENT_COLUMN] = (
            SURGERY_TREATMENT if i in surgical_set else "Medical management"
        )
        for junk in shape["extra_columns"]:
            row[junk] = junk_fill.get(junk, str(round(float(rng.normal(50, 10)), 1)))

    columns = (
        [ID_COLUMN]
        + [s.name for s in schema]
        + [TREATMENT_COLUMN, SNOT22_SIX_MONTH]
        + list(shape["extra_columns"])
    )
    ordered = [{c: row[c] for c in columns} for row in rows]
    return RawCohort(rows=ordered, columns=columns, provenance=tag)
