"""GNN training on the query-domain graph.

Banner-positive queries are scarce, so each training run keeps the full
positive set and redraws a 3x negative sample; metrics are reported as
mean +/- SD over the runs. The exported model is the run with the best
validation F1. Training is full-batch: Adam with weight decay, NLL loss on
the query nodes' log-softmax output, and cosine-annealed learning rate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch

from .cards import ModelCard, binary_metrics, summarize_runs
from .graph import QueryDomainGraph
from .sage import GraphTensors, HeterogeneousSage, HomogeneousSage, auto_hidden, parameter_count

VARIANTS = ("hom", "het")


@dataclass
class TrainConfig:
    epochs: int = 200
    lr: float = 1e-3
    weight_decay: float = 5e-4
    dropout: float = 0.5
    eta_min: float = 2e-5
    hidden: int = 0            # 0 resolves to the width targeting param_target
    param_target: int = 526_000
    runs: int = 10
    neg_ratio: int = 3
    split: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 7


@dataclass
class Masks:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


@dataclass
class TrainResult:
    card: ModelCard
    model: torch.nn.Module
    tensors: GraphTensors
    masks: Masks
    labeled_indices: np.ndarray
    labels: np.ndarray

    def query_confidences(self) -> np.ndarray:
        """P(banner) for every query node, in graph order."""
        self.model.eval()
        with torch.no_grad():
            log_probs = self.tensors.query_log_probs(self.model)
        return torch.exp(log_probs[:, 1]).numpy()


def _stratified_split(
    positives: np.ndarray, negatives: np.ndarray, split: tuple[float, float, float], rng: np.random.Generator
) -> Masks:
    def cut(indices: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        shuffled = indices.copy()
        rng.shuffle(shuffled)
        n = len(shuffled)
        n_train = max(1, int(round(split[0] * n)))
        n_val = max(1, int(round(split[1] * n)))
        n_train = min(n_train, n - 2) if n >= 3 else n_train
        return shuffled[:n_train], shuffled[n_train : n_train + n_val], shuffled[n_train + n_val :]

    p_train, p_val, p_test = cut(positives)
    n_train, n_val, n_test = cut(negatives)
    return Masks(
        train=np.concatenate([p_train, n_train]),
        val=np.concatenate([p_val, n_val]),
        test=np.concatenate([p_test, n_test]),
    )


def _build_model(variant: str, in_dim: int, hidden: int, dropout: float) -> torch.nn.Module:
    if variant == "hom":
        return HomogeneousSage(in_dim, hidden, dropout)
    if variant == "het":
        return HeterogeneousSage(in_dim, hidden, dropout)
    raise ValueError(f"unknown GNN variant {variant!r}; expected one of {VARIANTS}")


def train_gnn(graph: QueryDomainGraph, variant: str, config: Optional[TrainConfig] = None) -> TrainResult:
    """Train the requested variant and return its card plus the best model.

    Deterministic for a fixed config: every run's sampling and
    initialization derive from the config seed.
    """
    config = config or TrainConfig()
    if variant not in VARIANTS:
        raise ValueError(f"unknown GNN variant {variant!r}; expected one of {VARIANTS}")
    labels = graph.labels.astype(int)
    positives = np.flatnonzero(labels == 1)
    negative_pool = np.flatnonzero(labels == 0)
    if len(positives) == 0 or len(negative_pool) == 0:
        raise ValueError("training needs both bannered and unbannered queries")

    tensors = GraphTensors(graph)
    in_dim = tensors.x_q.shape[1]
    hidden = config.hidden or auto_hidden(in_dim, config.param_target)
    y_all = torch.tensor(labels, dtype=torch.long)

    per_run = []
    best = None  # (val_f1, run_index, model_state, masks, labeled)
    for run in range(config.runs):
        rng = np.random.default_rng(config.seed * 1009 + run)
        n_neg = min(len(negative_pool), config.neg_ratio * len(positives))
        negatives = rng.choice(negative_pool, size=n_neg, replace=False)
        masks = _stratified_split(positives, negatives, config.split, rng)

        torch.manual_seed(config.seed * 7919 + run)
        model = _build_model(variant, in_dim, hidden, config.dropout)
        optimizer = torch.optim.Adam(model.parameters(), lr=config.lr, weight_decay=config.weight_decay)
        scheduler = torch.optim.lr_scheduler.CosineAnnealingLR(
            optimizer, T_max=config.epochs, eta_min=config.eta_min
        )
        train_idx = torch.tensor(masks.train, dtype=torch.long)
        loss_fn = torch.nn.NLLLoss()
        for _ in range(config.epochs):
            model.train()
            optimizer.zero_grad()
            log_probs = tensors.query_log_probs(model)
            loss = loss_fn(log_probs[train_idx], y_all[train_idx])
            loss.backward()
            optimizer.step()
            scheduler.step()

        model.eval()
        with torch.no_grad():
            predictions = tensors.query_log_probs(model).argmax(dim=1).numpy()
        run_metrics = binary_metrics(labels[masks.test], predictions[masks.test])
        val_metrics = binary_metrics(labels[masks.val], predictions[masks.val])
        per_run.append(run_metrics)
        labeled = np.concatenate([masks.train, masks.val, masks.test])
        if best is None or val_metrics["f1"] > best[0]:
            best = (val_metrics["f1"], run, model, masks, labeled)

    _, best_run, best_model, best_masks, best_labeled = best
    card = ModelCard(
        variant=f"gnn_{variant}",
        parameter_count=parameter_count(best_model),
        runs=config.runs,
        metrics=summarize_runs(per_run),
        per_run=per_run,
        neg_ratio=config.neg_ratio,
        split=config.split,
        seed=config.seed,
        epochs=config.epochs,
        hidden=hidden,
    )
    card.notes.append(f"exported model is run {best_run} (best validation F1)")
    return TrainResult(
        card=card,
        model=best_model,
        tensors=tensors,
        masks=best_masks,
        labeled_indices=best_labeled,
        labels=labels.astype(bool),
    )
