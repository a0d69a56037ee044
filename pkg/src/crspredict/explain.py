"""Model interpretability: permutation importance, Shapley attributions, PCA.

Permutation importance scores features by the drop in balanced accuracy when
one column is shuffled, holding the rest fixed. Shapley attributions use
interventional marginalization over a background set: absent features are
substituted from background rows. Up to 12 features the coalition lattice is
enumerated exactly; beyond that a kernel-weighted least-squares estimate runs
on a sampled coalition budget (the full-lattice weighted solve is used
whenever the budget covers it, which makes the estimate exact again).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import BudgetTooSmall, DegenerateData, UnknownFeature
from .metrics import balanced_accuracy

EXACT_DIMENSION_LIMIT = 12


@dataclass
class PermEntry:
    name: str
    mean_drop: float
    std_drop: float


@dataclass
class PermImportance:
    entries: list[PermEntry]  # descending by mean drop
    repeats: int
    seed: int

    def ranked_names(self) -> list[str]:
        return [e.name for e in self.entries]

    def to_csv(self) -> str:
        lines = ["feature,mean_drop,std_drop"]
        lines += [f"{e.name},{e.mean_drop:.6f},{e.std_drop:.6f}" for e in self.entries]
        return "\n".join(lines) + "\n"


def permutation_importance(
    predict,
    X,
    y,
    feature,
    repeats: int = 30,
    seed: int = 0,
    columns: list[str] | None = None,
) -> tuple[float, float]:
    """Mean and std of the balanced-accuracy drop over shuffles of one column."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if isinstance(feature, str):
        if columns is None or feature not in columns:
            raise UnknownFeature(feature)
        feature = columns.index(feature)
    if not 0 <= feature < X.shape[1]:
        raise UnknownFeature(str(feature))
    base = balanced_accuracy(y, predict(X))
    rng = np.random.default_rng(seed)
    drops = np.zeros(repeats)
    for r in range(repeats):
        shuffled = X.copy()
        shuffled[:, feature] = rng.permutation(shuffled[:, feature])
        drops[r] = base - balanced_accuracy(y, predict(shuffled))
    return float(drops.mean()), float(drops.std())


def permutation_importance_table(
    predict, X, y, columns: list[str], repeats: int = 30, seed: int = 0
) -> PermImportance:
    entries = []
    for idx, name in enumerate(columns):
        mean_drop, std_drop = permutation_importance(
            predict, X, y, idx, repeats=repeats, seed=seed + idx
        )
        entries.append(PermEntry(name=name, mean_drop=mean_drop, std_drop=std_drop))
    entries.sort(key=lambda e: -e.mean_drop)
    return PermImportance(entries=entries, repeats=repeats, seed=seed)


@dataclass
class ShapResult:
    attributions: np.ndarray  # (d,)
    base_value: float
    fx: float
    mode: str  # "exact" | "sampled"

    def efficiency_residual(self) -> float:
        return float(self.fx - self.base_value - self.attributions.sum())


def _coalition_values(predict_value, row, background, masks: np.ndarray) -> np.ndarray:
    """v(S) for each mask row: mean model output with absent features drawn
    from the background (interventional substitution)."""
    values = np.zeros(masks.shape[0])
    for i, mask in enumerate(masks):
        composite = background.copy()
        composite[:, mask] = row[mask]
        values[i] = float(np.mean(predict_value(composite)))
    return values


def shap_values_exact(predict_value, row, background) -> ShapResult:
    """Full coalition enumeration; feasible up to EXACT_DIMENSION_LIMIT features."""
    row = np.asarray(row, dtype=np.float64).ravel()
    background = np.asarray(background, dtype=np.float64)
    d = row.size
    if d > EXACT_DIMENSION_LIMIT:
        raise ValueError(f"exact enumeration limited to {EXACT_DIMENSION_LIMIT} features")
    n_masks = 1 << d
    all_masks = np.zeros((n_masks, d), dtype=bool)
    for bit in range(d):
        all_masks[:, bit] = (np.arange(n_masks) >> bit) & 1
    values = _coalition_values(predict_value, row, background, all_masks)

    size_weight = np.array(
        [_factorial_weight(s, d) for s in range(d)]
    )  # weight for |S| when j absent
    phi = np.zeros(d)
    sizes = all_masks.sum(axis=1)
    for j in range(d):
        absent = ~all_masks[:, j]
        s_masks = np.flatnonzero(absent)
        with_j = s_masks | (1 << j)
        contrib = values[with_j] - values[s_masks]
        phi[j] = float(np.sum(size_weight[sizes[s_masks]] * contrib))
    base = float(values[0])
    fx = float(values[-1])
    return ShapResult(attributions=phi, base_value=base, fx=fx, mode="exact")


def _factorial_weight(s: int, d: int) -> float:
    # |S|! (d - |S| - 1)! / d!
    num = 1.0
    for k in range(2, s + 1):
        num *= k
    for k in range(2, d - s):
        num *= k
    den = 1.0
    for k in range(2, d + 1):
        den *= k
    return num / den


def _kernel_size_distribution(d: int) -> np.ndarray:
    weights = np.zeros(d - 1)
    for s in range(1, d):
        weights[s - 1] = (d - 1) / (comb(d, s) * s * (d - s))
    return weights / weights.sum()


def shap_values_sampled(
    predict_value, row, background, sampling_budget: int, seed: int = 0
) -> ShapResult:
    """Kernel-weighted least-squares attribution on a sampled coalition set.

    Budgets below 2d + 2 are refused. When the budget covers the whole
    lattice the complete weighted solve runs instead, recovering the exact
    values.
    """
    row = np.asarray(row, dtype=np.float64).ravel()
    background = np.asarray(background, dtype=np.float64)
    d = row.size
    if sampling_budget < 2 * d + 2:
        raise BudgetTooSmall(f"budget {sampling_budget} below minimum {2 * d + 2}")

    full_lattice = (1 << d) - 2 if d <= 24 else None
    rng = np.random.default_rng(seed)
    if full_lattice is not None and sampling_budget >= full_lattice:
        n_masks = 1 << d
        codes = np.arange(1, n_masks - 1)
        masks = np.zeros((codes.size, d), dtype=bool)
        for bit in range(d):
            masks[:, bit] = (codes >> bit) & 1
        sizes = masks.sum(axis=1)
        kernel = np.array([(d - 1) / (comb(d, int(s)) * s * (d - s)) for s in sizes])
    else:
        size_probs = _kernel_size_distribution(d)
        half = sampling_budget // 2
        drawn = []
        for _ in range(half):
            s = 1 + int(rng.choice(d - 1, p=size_probs))
            members = rng.choice(d, size=s, replace=False)
            mask = np.zeros(d, dtype=bool)
            mask[members] = True
            drawn.append(mask)
            drawn.append(~mask)  # paired complement
        masks = np.asarray(drawn, dtype=bool)
        kernel = np.ones(masks.shape[0])

    v_empty = float(np.mean(predict_value(background)))
    fx = float(np.mean(predict_value(row.reshape(1, -1))))
    values = _coalition_values(predict_value, row, background, masks)

    # weighted least squares with the efficiency constraint eliminated
    z = masks.astype(np.float64)
    delta = fx - v_empty
    y_target = values - v_empty - z[:, -1] * delta
    design = z[:, :-1] - z[:, [-1]]
    w_sqrt = np.sqrt(kernel)[:, None]
    solution, *_ = np.linalg.lstsq(design * w_sqrt, y_target * w_sqrt.ravel(), rcond=None)
    phi = np.zeros(d)
    phi[:-1] = solution
    phi[-1] = delta - solution.sum()
    return ShapResult(attributions=phi, base_value=v_empty, fx=fx, mode="sampled")


def shap_values(
    predict_value,
    row,
    background,
    sampling_budget: int | None = None,
    seed: int = 0,
) -> ShapResult:
    """Exact enumeration up to 12 features, sampled beyond (or when a budget
    is forced). background must be nonempty."""
    background = np.asarray(background, dtype=np.float64)
    if background.size == 0:
        raise ValueError("background set must be nonempty")
    row = np.asarray(row, dtype=np.float64).ravel()
    if sampling_budget is None:
        if row.size <= EXACT_DIMENSION_LIMIT:
            return shap_values_exact(predict_value, row, background)
        sampling_budget = 2048 + 2 * row.size
    return shap_values_sampled(predict_value, row, background, sampling_budget, seed)


def stratified_background(X, y, size: int = 100, seed: int = 0) -> np.ndarray:
    """Class-stratified background sample used by the serving layer."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] <= size:
        return X.copy()
    rng = np.random.default_rng(seed)
    picks: list[int] = []
    for c in sorted(np.unique(y)):
        positions = np.flatnonzero(y == c)
        share = max(1, int(round(size * positions.size / y.size)))
        picks.extend(int(i) for i in rng.permutation(positions)[:share])
    return X[np.array(sorted(picks), dtype=np.int64)]


@dataclass
class PcaResult:
    loadings: np.ndarray  # (d, d) columns are components
    explained_ratios: np.ndarray
    cumulative_ratios: np.ndarray
    scores: np.ndarray
    means: np.ndarray
    scales: np.ndarray
    components_for_95: int = field(default=0)


def pca(data, standardize: bool = True) -> PcaResult:
    """Eigendecomposition of the (optionally standardized) covariance."""
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a 2-D matrix with at least 2 rows")
    means = X.mean(axis=0)
    if standardize:
        scales = X.std(axis=0)
        scales[scales == 0.0] = 1.0
    else:
        scales = np.ones(X.shape[1])
    Z = (X - means) / scales
    cov = (Z.T @ Z) / (X.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.clip(eigvals[order], 0.0, None)
    eigvecs = eigvecs[:, order]
    total = eigvals.sum()
    if total <= 1e-12:
        raise DegenerateData("zero total variance")
    ratios = eigvals / total
    cumulative = np.cumsum(ratios)
    return PcaResult(
        loadings=eigvecs,
        explained_ratios=ratios,
        cumulative_ratios=cumulative,
        scores=Z @ eigvecs,
        means=means,
        scales=scales,
        components_for_95=int(np.searchsorted(cumulative, 0.95) + 1),
    )


def correlation_matrix(X) -> np.ndarray:
    """Pearson correlations; constant columns correlate 0 with everything."""
    X = np.asarray(X, dtype=np.float64)
    stds = X.std(axis=0)
    safe = stds > 0
    out = np.zeros((X.shape[1], X.shape[1]))
    if np.any(safe):
        sub = np.corrcoef(X[:, safe], rowvar=False)
        out[np.ix_(safe, safe)] = np.atleast_2d(sub)
    np.fill_diagonal(out, 1.0)
    return out
