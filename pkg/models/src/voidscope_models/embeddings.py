"""Text embedding backends for graph node features.

The hashing embedder is the offline default: deterministic, dependency-free,
and adequate for structural experiments. The sentence-transformer and
DistilBERT backends produce the multilingual embeddings used at full scale
but require downloaded model weights, so they are constructed lazily by
name.
"""

from __future__ import annotations

import hashlib
import math
from typing import Protocol, Sequence

import numpy as np


class TextEmbedder(Protocol):
    dim: int

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        """Return an array of shape (len(texts), dim)."""


class HashingEmbedder:
    """Deterministic bag-of-features embedding via token hashing.

    Tokens and adjacent-token bigrams are hashed into a fixed number of
    signed buckets; vectors are L2-normalized. Stable across processes and
    platforms (hashes come from sha256, not Python's salted hash()).
    """

    def __init__(self, dim: int = 64):
        self.dim = dim

    def _bucket(self, feature: str) -> tuple[int, float]:
        digest = hashlib.sha256(feature.encode("utf-8")).digest()
        index = int.from_bytes(digest[:4], "big") % self.dim
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        return index, sign

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim))
        for row, text in enumerate(texts):
            tokens = text.lower().split()
            features = tokens + [f"{a}_{b}" for a, b in zip(tokens, tokens[1:])]
            for feature in features:
                index, sign = self._bucket(feature)
                out[row, index] += sign
            norm = math.sqrt(float(np.dot(out[row], out[row])))
            if norm > 0:
                out[row] /= norm
        return out


class SentenceTransformerEmbedder:
    """Multilingual sentence-embedding backend (requires model download)."""

    def __init__(self, model_name: str = "paraphrase-multilingual-MiniLM-L12-v2"):
        from sentence_transformers import SentenceTransformer

        self.model = SentenceTransformer(model_name)
        self.dim = int(self.model.get_sentence_embedding_dimension())

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        return np.asarray(self.model.encode(list(texts), show_progress_bar=False))


class DistilBertEmbedder:
    """Mean-pooled DistilBERT token embeddings (requires model download)."""

    def __init__(self, model_name: str = "distilbert-base-multilingual-cased"):
        import torch
        from transformers import AutoModel, AutoTokenizer

        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        self.model = AutoModel.from_pretrained(model_name)
        self.model.eval()
        self.dim = int(self.model.config.dim)
        self._torch = torch

    def encode(self, texts: Sequence[str]) -> np.ndarray:
        torch = self._torch
        out = []
        with torch.no_grad():
            for start in range(0, len(texts), 32):
                batch = self.tokenizer(
                    list(texts[start : start + 32]),
                    padding=True,
                    truncation=True,
                    max_length=128,
                    return_tensors="pt",
                )
                hidden = self.model(**batch).last_hidden_state
                mask = batch["attention_mask"].unsqueeze(-1)
                pooled = (hidden * mask).sum(1) / mask.sum(1).clamp(min=1)
                out.append(pooled.numpy())
        return np.concatenate(out, axis=0)


def get_embedder(spec: str = "hashing") -> TextEmbedder:
    """Build an embedder from a spec string.

    "hashing" or "hashing:<dim>" for the offline default,
    "st:<model-name>" for sentence-transformers,
    "distilbert:<model-name>" for mean-pooled DistilBERT.
    """
    if spec.startswith("hashing"):
        _, _, dim = spec.partition(":")
        return HashingEmbedder(dim=int(dim) if dim else 64)
    if spec.startswith("st:"):
        return SentenceTransformerEmbedder(spec[3:])
    if spec.startswith("distilbert:"):
        return DistilBertEmbedder(spec[len("distilbert:"):])
    raise ValueError(f"unknown embedder spec: {spec!r}")
