"""Query normalization: tokenizing, 32-word truncation, advanced operators.

The tokenizer splits on whitespace, strips surrounding punctuation from each
chunk, and drops chunks with no word character (punctuation- or emoji-only),
so degenerate queries yield a token count of 0. Colons, hashes, and other
operator-bearing characters survive stripping.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Optional

MAX_QUERY_TOKENS = 32

ADVANCED_OPERATORS = (
    "site",
    "inurl",
    "filetype",
    "intitle",
    "ext",
    "before",
    "source",
    "related",
    "allintitle",
    "after",
    "allinurl",
)

_STRIP_CHARS = "\"'()[]{}<>.,;!?“”‘’«»`"
_PIECE_SPLIT = re.compile(r"[|()\"']+")


@dataclass(frozen=True)
class OperatorSet:
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def has_any(self) -> bool:
        return any(v > 0 for v in self.counts.values())

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class TopicTags:
    political: bool = False
    conspiracy: bool = False
    matched_terms: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Query:
    text: str
    tokens: tuple[str, ...]
    truncated: bool
    truncated_token_count: int
    char_count: int
    operator_set: OperatorSet
    topic_tags: Optional[TopicTags] = None

    def with_tags(self, tags: TopicTags) -> "Query":
        return replace(self, topic_tags=tags)


def _chunk_token(chunk: str) -> str:
    """Strip surrounding punctuation; '' when nothing word-like remains."""
    token = chunk.strip(_STRIP_CHARS)
    if not any(ch.isalnum() for ch in token):
        return ""
    return token


def normalize_query(raw: str) -> Query:
    """Tokenize and truncate a raw query to the 32-word search limit.

    The display text keeps original casing and punctuation (whitespace
    collapsed); tokens are lowercased for matching. char_count is measured
    on the truncated display text.
    """
    chunks = raw.split()
    tokens: list[str] = []
    last_token_chunk = -1
    total_tokens = 0
    for i, chunk in enumerate(chunks):
        token = _chunk_token(chunk)
        if not token:
            continue
        total_tokens += 1
        if total_tokens <= MAX_QUERY_TOKENS:
            tokens.append(token.lower())
            last_token_chunk = i

    truncated = total_tokens > MAX_QUERY_TOKENS
    if truncated:
        display_chunks = chunks[: last_token_chunk + 1]
    else:
        display_chunks = chunks
    text = " ".join(display_chunks)
    return Query(
        text=text,
        tokens=tuple(tokens),
        truncated=truncated,
        truncated_token_count=len(tokens),
        char_count=len(text),
        operator_set=count_operators(text),
    )


def count_operators(text: str) -> OperatorSet:
    """Count advanced-operator uses ("op:value" or a bare "op:" token).

    Matching is case-insensitive and tolerant of quotes, parentheses, and
    pipe-joined alternations around the operator token.
    """
    counts = {op: 0 for op in ADVANCED_OPERATORS}
    for chunk in text.split():
        token = chunk.strip(_STRIP_CHARS)
        for piece in _PIECE_SPLIT.split(token):
            name, colon, _value = piece.partition(":")
            if colon and name.lower() in counts:
                counts[name.lower()] += 1
    return OperatorSet(counts={op: n for op, n in counts.items() if n > 0})


def detect_operators(q: Query) -> OperatorSet:
    return count_operators(q.text)
