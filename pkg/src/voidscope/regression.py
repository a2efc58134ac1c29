"""Feature assembly and L1-regularized logistic regression.

The solver minimizes the per-observation objective

    (1/n) * NLL(w, b) + alpha * ||w||_1        (intercept b unpenalized)

by monotone proximal gradient descent with a backtracking line search: each
step soft-thresholds, so small coefficients land at exactly zero. The line
search accepts a step only when the composite objective satisfies the local
quadratic upper bound, which guarantees the objective never increases.
Penalizing the averaged likelihood keeps alpha comparable across sample
sizes, matching the convention of the common statistics packages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .metrics import SerpAggregate
from .queries import Query

# feature order is the model matrix column order
QUERY_FEATURES = ("char_count_log10", "conspiracy_flag", "political_flag")
OPERATOR_FEATURE = "operator_flag"
SERP_FEATURES = (
    "avg_low_quality_score",
    "rank_weighted_partisanship",
    "estimated_total_results_log10",
    "avg_domain_traffic_log10",
    "news_domain_count",
    "unique_domain_count",
)


class SingleClassError(ValueError):
    """Labels contain only one class; a logit cannot be fit."""


def assemble_features(
    q: Query,
    agg: SerpAggregate,
    target: bool,
    include_operator_flag: bool = False,
) -> Optional[tuple[dict[str, float], int]]:
    """Build one (features, label) row, or None when a required SERP field
    is absent (listwise deletion; callers count the drops).

    The quality feature is inverted (1 - average domain quality) so that it
    reads as a low-quality score and loads positively on quality banners.
    The operator flag is only meaningful for relevance-banner targets, where
    operator-bearing queries actually occur on both label sides.
    """
    if q.topic_tags is None:
        raise ValueError("query must be lexicon-tagged before feature assembly")
    required = (
        agg.avg_domain_quality,
        agg.rank_weighted_partisanship,
        agg.estimated_total_results_log10,
        agg.avg_domain_traffic_log10,
    )
    if any(v is None for v in required):
        return None
    features = {
        "char_count_log10": math.log10(1.0 + q.char_count),
        "conspiracy_flag": 1.0 if q.topic_tags.conspiracy else 0.0,
        "political_flag": 1.0 if q.topic_tags.political else 0.0,
        "avg_low_quality_score": 1.0 - agg.avg_domain_quality,
        "rank_weighted_partisanship": agg.rank_weighted_partisanship,
        "estimated_total_results_log10": agg.estimated_total_results_log10,
        "avg_domain_traffic_log10": agg.avg_domain_traffic_log10,
        "news_domain_count": float(agg.news_domain_count),
        "unique_domain_count": float(agg.unique_domain_count),
    }
    if include_operator_flag:
        features["operator_flag"] = 1.0 if q.operator_set.has_any else 0.0
    return features, int(target)


def assemble_dataset(
    rows: Sequence[tuple[Query, SerpAggregate, bool]],
    include_operator_flag: bool = False,
) -> tuple[np.ndarray, np.ndarray, list[str], int]:
    """Stack feature rows into (X, y, feature_names, dropped_count)."""
    names = list(QUERY_FEATURES)
    if include_operator_flag:
        names.append(OPERATOR_FEATURE)
    names += list(SERP_FEATURES)
    xs, ys, dropped = [], [], 0
    for q, agg, target in rows:
        row = assemble_features(q, agg, target, include_operator_flag)
        if row is None:
            dropped += 1
            continue
        features, label = row
        xs.append([features[name] for name in names])
        ys.append(label)
    X = np.asarray(xs, dtype=float) if xs else np.empty((0, len(names)))
    y = np.asarray(ys, dtype=float)
    return X, y, names, dropped


@dataclass
class LogitModel:
    coefficients: dict[str, float]
    intercept: float
    alpha: float
    converged: bool
    iterations: int
    pseudo_r2: Optional[float]
    feature_names: list[str] = field(default_factory=list)
    standardized: bool = False

    @property
    def coef_vector(self) -> np.ndarray:
        return np.array([self.coefficients[name] for name in self.feature_names])

    def to_dict(self) -> dict:
        return {
            "coefficients": self.coefficients,
            "intercept": self.intercept,
            "alpha": self.alpha,
            "converged": self.converged,
            "iterations": self.iterations,
            "pseudo_r2": self.pseudo_r2,
            "feature_names": self.feature_names,
            "standardized": self.standardized,
        }


def _nll(z: np.ndarray, y: np.ndarray) -> float:
    # sum_i log(1 + exp(z_i)) - y_i z_i, computed stably
    return float(np.sum(np.logaddexp(0.0, z) - y * z))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _soft_threshold(v: np.ndarray, t: float | np.ndarray) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def fit_l1_logit(
    X: np.ndarray,
    y: np.ndarray,
    alpha: float = 0.1,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    feature_names: Optional[Sequence[str]] = None,
    standardize: bool = False,
) -> LogitModel:
    """Fit an L1-penalized logistic regression.

    Raises SingleClassError when y has a single class. A model that hits
    max_iter without converging is returned with converged=False and no
    pseudo-R². When standardize=True, columns are z-scored for the solve and
    the coefficients are mapped back to original units, so reported values
    are always in input scale.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError("X and y shapes are incompatible")
    if np.isnan(X).any():
        raise ValueError("X contains NaNs; drop or impute before fitting")
    classes = np.unique(y)
    if classes.size < 2:
        raise SingleClassError(f"labels contain a single class: {classes}")

    names = list(feature_names) if feature_names is not None else [f"x{j}" for j in range(X.shape[1])]
    if len(names) != X.shape[1]:
        raise ValueError("feature_names length does not match X")

    # The solve always runs on centered, unit-scale columns for conditioning.
    # With w_j = v_j / scale_j this is an exact reparametrization, provided
    # the L1 threshold is rescaled per column: penalizing raw-unit
    # coefficients means threshold alpha / scale_j in solver units, while
    # standardize=True penalizes standardized coefficients (threshold alpha).
    col_mean = X.mean(axis=0)
    col_scale = X.std(axis=0)
    col_scale[col_scale == 0.0] = 1.0
    Xs = (X - col_mean) / col_scale
    thresholds = np.full(X.shape[1], alpha) if standardize else alpha / col_scale

    n, d = Xs.shape
    w = np.zeros(d)
    b = 0.0
    # Lipschitz bound for the averaged logistic NLL gradient: ||[X,1]||^2 / 4n
    lipschitz = 0.25 * (np.linalg.norm(Xs, 2) ** 2 + n) / n
    step = 1.0 / max(lipschitz, 1e-12)

    z = Xs @ w + b
    objective = _nll(z, y) / n + float(thresholds @ np.abs(w))
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        p = _sigmoid(z)
        grad_w = Xs.T @ (p - y) / n
        grad_b = float(np.mean(p - y))

        eta = step * 4.0  # optimistic start; backtrack to the safe step
        while True:
            w_new = _soft_threshold(w - eta * grad_w, eta * thresholds)
            b_new = b - eta * grad_b
            z_new = Xs @ w_new + b_new
            f_new = _nll(z_new, y) / n
            dw = w_new - w
            db = b_new - b
            # quadratic upper-bound acceptance keeps the descent monotone
            model_bound = (
                _nll(z, y) / n
                + grad_w @ dw
                + grad_b * db
                + (dw @ dw + db * db) / (2.0 * eta)
            )
            if f_new <= model_bound + 1e-12 or eta <= step * 1e-6:
                break
            eta *= 0.5
        objective_new = f_new + float(thresholds @ np.abs(w_new))
        move = max(np.max(np.abs(dw)) if d else 0.0, abs(db))
        w, b, z = w_new, b_new, z_new
        if objective_new > objective + 1e-9:
            raise AssertionError("line search failed to keep descent monotone")
        improved = objective - objective_new
        objective = objective_new
        if move < tol and improved < tol * max(1.0, abs(objective)):
            converged = True
            break

    # zero tolerance: snap below-threshold coefficients to exact zeros
    w[np.abs(w) <= tol] = 0.0

    w_orig = w / col_scale
    b_orig = b - float(np.sum(w * col_mean / col_scale))

    pseudo_r2 = None
    if converged:
        mean_y = float(np.mean(y))
        b_null = math.log(mean_y / (1.0 - mean_y))
        ll_null = -_nll(np.full(n, b_null), y)
        ll_model = -_nll(X @ w_orig + b_orig, y)
        pseudo_r2 = 1.0 - ll_model / ll_null if ll_null != 0.0 else 0.0

    return LogitModel(
        coefficients={name: float(w_orig[j]) for j, name in enumerate(names)},
        intercept=float(b_orig),
        alpha=alpha,
        converged=converged,
        iterations=iterations,
        pseudo_r2=pseudo_r2,
        feature_names=names,
        standardized=standardize,
    )


def predict(model: LogitModel, X: np.ndarray) -> np.ndarray:
    """Class-1 probabilities under the fitted model."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(model.feature_names):
        raise ValueError(
            f"feature dimension mismatch: got {X.shape}, expected (*, {len(model.feature_names)})"
        )
    return _sigmoid(X @ model.coef_vector + model.intercept)
