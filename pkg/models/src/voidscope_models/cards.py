"""Model cards: the audit record attached to every trained model."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

SPLIT_NOTE = "stratified split 0.8/0.1/0.1 (fractions must sum to 1)"


def binary_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> dict[str, float]:
    y_true = np.asarray(y_true, dtype=bool)
    y_pred = np.asarray(y_pred, dtype=bool)
    tp = int(np.sum(y_true & y_pred))
    fp = int(np.sum(~y_true & y_pred))
    fn = int(np.sum(y_true & ~y_pred))
    accuracy = float(np.mean(y_true == y_pred)) if y_true.size else 0.0
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return {"accuracy": accuracy, "f1": f1, "precision": precision, "recall": recall}


def summarize_runs(per_run: list[dict[str, float]]) -> dict[str, dict[str, float]]:
    out = {}
    for name in ("accuracy", "f1", "precision", "recall"):
        values = np.array([run[name] for run in per_run])
        out[name] = {"mean": float(values.mean()), "sd": float(values.std())}
    return out


@dataclass
class ModelCard:
    variant: str  # text_only | gnn_hom | gnn_het
    parameter_count: int
    runs: int
    metrics: dict[str, dict[str, float]]
    per_run: list[dict[str, float]]
    neg_ratio: int
    split: tuple[float, float, float]
    seed: int
    epochs: int
    hidden: Optional[int] = None
    notes: list[str] = field(default_factory=lambda: [SPLIT_NOTE])
    export_ref: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "parameter_count": self.parameter_count,
            "runs": self.runs,
            "metrics": self.metrics,
            "per_run": self.per_run,
            "neg_ratio": self.neg_ratio,
            "split": list(self.split),
            "seed": self.seed,
            "epochs": self.epochs,
            "hidden": self.hidden,
            "notes": self.notes,
            "export_ref": self.export_ref,
        }

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
