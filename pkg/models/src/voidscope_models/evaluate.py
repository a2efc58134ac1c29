"""Post-training evaluation: holdout metrics, confidence-ranked predictions,
quality curves over the most confident predictions, and top-K hit counts
against newly-bannered queries.

The confidence CSV written here is the file contract back to the audit
toolkit: ``query_id,confidence`` rows, most confident first, floats printed
with full round-trip precision.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .cards import binary_metrics
from .gnn import TrainResult

DEFAULT_K_LIST = (10, 50, 100, 500, 1000, 5000, 10000)
CURVE_TOP_N = 500
CURVE_WINDOW = 10


def rolling_mean(values: Sequence[float], window: int = CURVE_WINDOW) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if len(arr) < window:
        return np.array([])
    kernel = np.ones(window) / window
    return np.convolve(arr, kernel, mode="valid")


@dataclass
class EvaluationBundle:
    holdout_metrics: dict[str, float]
    ranked_predictions: list[tuple[str, float]]         # unlabeled, most confident first
    quality_curve: np.ndarray                           # rolling mean over top predictions
    quality_joined: int
    top_k_hits: dict[int, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "holdout_metrics": self.holdout_metrics,
            "ranked_predictions": len(self.ranked_predictions),
            "quality_curve_points": len(self.quality_curve),
            "quality_joined": self.quality_joined,
            "top_k_hits": {str(k): v for k, v in self.top_k_hits.items()},
        }


def evaluate_predictions(
    result: TrainResult,
    graph_query_ids: Sequence[str],
    quality_by_query: dict[str, float],
    k_list: Sequence[int] = DEFAULT_K_LIST,
    new_banner_ids: Optional[set[str]] = None,
    curve_top_n: int = CURVE_TOP_N,
    curve_window: int = CURVE_WINDOW,
) -> EvaluationBundle:
    """Assemble the evaluation bundle for a trained model.

    Ranked predictions cover queries outside the labeled training sample.
    The quality curve is the rolling mean of per-query average domain
    quality over the most confident predictions that have a quality join;
    it errors if no prediction joins.
    """
    confidences = result.query_confidences()
    test_idx = result.masks.test
    predictions = confidences >= 0.5
    holdout = binary_metrics(result.labels[test_idx], predictions[test_idx])

    labeled = set(result.labeled_indices.tolist())
    order = sorted(
        (i for i in range(len(graph_query_ids)) if i not in labeled),
        key=lambda i: (-confidences[i], graph_query_ids[i]),
    )
    ranked = [(graph_query_ids[i], float(confidences[i])) for i in order]

    top = ranked[:curve_top_n]
    joined = [quality_by_query[qid] for qid, _ in top if qid in quality_by_query]
    if not joined:
        raise ValueError("no confident prediction has a quality score to join")
    curve = rolling_mean(joined, curve_window)

    hits = {}
    if new_banner_ids is not None:
        for k in k_list:
            top_k = {qid for qid, _ in ranked[:k]}
            hits[k] = len(top_k & new_banner_ids)

    return EvaluationBundle(
        holdout_metrics=holdout,
        ranked_predictions=ranked,
        quality_curve=curve,
        quality_joined=len(joined),
        top_k_hits=hits,
    )


def write_confidence_csv(path: str | Path, ranked: Sequence[tuple[str, float]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["query_id", "confidence"])
        for query_id, confidence in ranked:
            writer.writerow([query_id, repr(float(confidence))])


def write_quality_curve_csv(path: str | Path, curve: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["position", "rolling_mean_quality"])
        for i, value in enumerate(curve):
            writer.writerow([i, repr(float(value))])


def write_topk_csv(path: str | Path, hits: dict[int, int]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "hits"])
        for k in sorted(hits):
            writer.writerow([k, hits[k]])
