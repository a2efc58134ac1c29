"""Text-only banner classifier: a DistilBERT sequence classifier over raw
query text.

With a pretrained checkpoint name the standard tokenizer and weights are
used. Without one (the offline default) a compact DistilBERT is built from
scratch with a whitespace vocabulary fitted on the training queries; that
keeps the architecture and training loop identical while staying fully
self-contained. Training follows the fixed recipe: Adam at 2e-5 with a
linear warm-up then linear decay schedule, two epochs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import torch
from transformers import DistilBertConfig, DistilBertForSequenceClassification

from .cards import ModelCard, binary_metrics, summarize_runs


class SingleClassError(ValueError):
    pass


@dataclass
class TextTrainConfig:
    epochs: int = 2
    lr: float = 2e-5
    warmup_fraction: float = 0.1
    batch_size: int = 16
    max_len: int = 48
    seed: int = 7
    pretrained: Optional[str] = None  # e.g. "distilbert-base-uncased"
    # compact-model dimensions for the from-scratch path
    dim: int = 64
    n_layers: int = 2
    n_heads: int = 2
    hidden_dim: int = 128
    eval_fraction: float = 0.2


class WhitespaceVocab:
    """Minimal deterministic tokenizer: lower-cased whitespace tokens."""

    PAD = 0
    UNK = 1

    def __init__(self, texts: Sequence[str], max_len: int):
        tokens = sorted({t for text in texts for t in text.lower().split()})
        self.index = {token: i + 2 for i, token in enumerate(tokens)}
        self.max_len = max_len

    @property
    def size(self) -> int:
        return len(self.index) + 2

    def encode(self, texts: Sequence[str]) -> dict[str, torch.Tensor]:
        rows = []
        for text in texts:
            ids = [self.index.get(t, self.UNK) for t in text.lower().split()][: self.max_len]
            rows.append(ids or [self.UNK])
        width = max(len(r) for r in rows)
        input_ids = torch.full((len(rows), width), self.PAD, dtype=torch.long)
        mask = torch.zeros((len(rows), width), dtype=torch.long)
        for i, ids in enumerate(rows):
            input_ids[i, : len(ids)] = torch.tensor(ids)
            mask[i, : len(ids)] = 1
        return {"input_ids": input_ids, "attention_mask": mask}


def linear_warmup_schedule(optimizer, warmup_steps: int, total_steps: int):
    def factor(step: int) -> float:
        if step < warmup_steps:
            return (step + 1) / max(1, warmup_steps)
        remaining = total_steps - step
        return max(0.0, remaining / max(1, total_steps - warmup_steps))

    return torch.optim.lr_scheduler.LambdaLR(optimizer, factor)


@dataclass
class TextModelResult:
    card: ModelCard
    model: DistilBertForSequenceClassification
    vocab: Optional[WhitespaceVocab]
    tokenizer: Optional[object]
    max_len: int

    def predict_proba(self, texts: Sequence[str]) -> np.ndarray:
        self.model.eval()
        if self.vocab is not None:
            batch = self.vocab.encode(texts)
        else:
            batch = self.tokenizer(
                list(texts), padding=True, truncation=True, max_length=self.max_len, return_tensors="pt"
            )
        with torch.no_grad():
            logits = self.model(**batch).logits
        return torch.softmax(logits, dim=1).numpy()


def finetune_text_classifier(
    examples: Sequence[tuple[str, bool]], config: Optional[TextTrainConfig] = None
) -> TextModelResult:
    """Fine-tune the classifier on (query text, banner label) pairs."""
    config = config or TextTrainConfig()
    labels = np.array([int(lbl) for _, lbl in examples])
    if len(set(labels.tolist())) < 2:
        raise SingleClassError("need both bannered and unbannered queries")
    texts = [text for text, _ in examples]

    torch.manual_seed(config.seed)
    rng = np.random.default_rng(config.seed)

    vocab = None
    tokenizer = None
    if config.pretrained:
        from transformers import AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(config.pretrained)
        model = DistilBertForSequenceClassification.from_pretrained(config.pretrained, num_labels=2)
    else:
        vocab = WhitespaceVocab(texts, config.max_len)
        model_config = DistilBertConfig(
            vocab_size=vocab.size,
            dim=config.dim,
            n_layers=config.n_layers,
            n_heads=config.n_heads,
            hidden_dim=config.hidden_dim,
            max_position_embeddings=config.max_len,
            num_labels=2,
        )
        model = DistilBertForSequenceClassification(model_config)

    order = rng.permutation(len(texts))
    n_eval = int(round(config.eval_fraction * len(texts)))
    eval_idx, train_idx = order[:n_eval], order[n_eval:]
    if len(train_idx) == 0:
        train_idx, eval_idx = order, order[:0]

    def encode(batch_texts):
        if vocab is not None:
            return vocab.encode(batch_texts)
        return tokenizer(
            list(batch_texts), padding=True, truncation=True, max_length=config.max_len, return_tensors="pt"
        )

    steps_per_epoch = int(np.ceil(len(train_idx) / config.batch_size))
    total_steps = max(1, steps_per_epoch * config.epochs)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.lr)
    scheduler = linear_warmup_schedule(
        optimizer, warmup_steps=int(config.warmup_fraction * total_steps), total_steps=total_steps
    )
    loss_fn = torch.nn.CrossEntropyLoss()

    model.train()
    for _ in range(config.epochs):
        for start in range(0, len(train_idx), config.batch_size):
            chunk = train_idx[start : start + config.batch_size]
            batch = encode([texts[i] for i in chunk])
            target = torch.tensor(labels[chunk], dtype=torch.long)
            optimizer.zero_grad()
            logits = model(**batch).logits
            loss = loss_fn(logits, target)
            loss.backward()
            optimizer.step()
            scheduler.step()

    model.eval()
    with torch.no_grad():
        all_logits = model(**encode(texts)).logits
        predictions = all_logits.argmax(dim=1).numpy()
    eval_metrics = binary_metrics(
        labels[eval_idx] if len(eval_idx) else labels, predictions[eval_idx] if len(eval_idx) else predictions
    )
    card = ModelCard(
        variant="text_only",
        parameter_count=sum(p.numel() for p in model.parameters()),
        runs=1,
        metrics=summarize_runs([eval_metrics]),
        per_run=[eval_metrics],
        neg_ratio=3,
        split=(1 - config.eval_fraction, 0.0, config.eval_fraction),
        seed=config.seed,
        epochs=config.epochs,
        hidden=None,
    )
    card.notes.append(
        "pretrained checkpoint" if config.pretrained else "compact from-scratch DistilBERT (offline mode)"
    )
    return TextModelResult(card=card, model=model, vocab=vocab, tokenizer=tokenizer, max_len=config.max_len)
