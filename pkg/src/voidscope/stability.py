"""SERP stability metrics: average-overlap RBO, windowed RBO, corpus RBO_k,
banner-set Jaccard matrices, and cross-wave URL churn.

RBO here is the persistence-free variant: the per-depth overlap fraction
|S_1:d ∩ U_1:d| / d averaged over depths 1..D with D the longer length, so a
shorter list simply contributes no items past its end. Windowed scores for a
query average the RBO of each timestep against its K neighbors on both
sides, skipping neighbors that fall off either end; the divisor 2KT uses
T = last observed step index, which slightly under-weights boundary-heavy
windows — kept literal, and surfaced in report metadata instead of being
corrected silently.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class RankedList:
    items: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.items)) != len(self.items):
            raise ValueError("ranked list contains duplicate items")

    @property
    def depth(self) -> int:
        return len(self.items)

    def truncated(self, depth: Optional[int]) -> "RankedList":
        if depth is None or depth >= len(self.items):
            return self
        return RankedList(self.items[:depth])


def rbo(s: RankedList | Sequence[str], u: RankedList | Sequence[str]) -> float:
    """Average per-depth overlap of two duplicate-free ranked lists.

    Two empty lists are defined to agree perfectly (1.0).
    """
    s_items = s.items if isinstance(s, RankedList) else tuple(s)
    u_items = u.items if isinstance(u, RankedList) else tuple(u)
    if len(set(s_items)) != len(s_items) or len(set(u_items)) != len(u_items):
        raise ValueError("ranked lists must be duplicate-free")
    depth = max(len(s_items), len(u_items))
    if depth == 0:
        return 1.0
    seen_s: set[str] = set()
    seen_u: set[str] = set()
    overlap = 0  # |seen_s ∩ seen_u|; an item counts when the second side sees it
    total = 0.0
    for d in range(1, depth + 1):
        if d <= len(s_items):
            x = s_items[d - 1]
            seen_s.add(x)
            if x in seen_u:
                overlap += 1
        if d <= len(u_items):
            y = u_items[d - 1]
            seen_u.add(y)
            if y in seen_s:
                overlap += 1
        total += overlap / d
    return total / depth


@dataclass(frozen=True)
class RboMatrix:
    """Pairwise RBO between all observed timesteps of one query.

    Gap steps are excluded before construction, so indices are compacted to
    observed steps; step_labels keeps the original step ids for reporting.
    """

    query_id: str
    values: np.ndarray
    step_labels: tuple[int, ...]

    @property
    def timesteps(self) -> int:
        return self.values.shape[0]


def build_rbo_matrix(
    query_id: str,
    serps_by_step: Sequence[tuple[int, RankedList]],
    depth: Optional[int] = None,
) -> RboMatrix:
    """Build the symmetric RBO matrix over observed steps, optionally
    truncating every list to a fixed depth first."""
    ordered = sorted(serps_by_step, key=lambda pair: pair[0])
    labels = tuple(step for step, _ in ordered)
    lists = [ranked.truncated(depth) for _, ranked in ordered]
    n = len(lists)
    values = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = rbo(lists[i], lists[j])
    return RboMatrix(query_id=query_id, values=values, step_labels=labels)


def windowed_rbo(x: RboMatrix | np.ndarray, k: int) -> float:
    """Windowed per-query stability: neighbor-averaged RBO at window size k."""
    values = x.values if isinstance(x, RboMatrix) else np.asarray(x)
    steps = values.shape[0]
    if k < 1:
        raise ValueError("window size must be >= 1")
    if k >= steps:
        raise ValueError(f"window size {k} must be smaller than timestep count {steps}")
    last = steps - 1
    total = 0.0
    for t in range(steps):
        for offset in range(1, k + 1):
            if t - offset >= 0:
                total += values[t, t - offset]
            if t + offset <= last:
                total += values[t, t + offset]
    return total / (2.0 * k * last)


def rbo_k(matrices: Sequence[RboMatrix | np.ndarray], k: int) -> float:
    """Corpus-level stability: the mean of windowed scores over all queries."""
    if not matrices:
        raise ValueError("need at least one query matrix")
    scores = [windowed_rbo(m, k) for m in matrices]
    return sum(scores) / len(scores)


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def jaccard_matrix(series: Sequence[set]) -> np.ndarray:
    """Pairwise Jaccard similarity between per-timestep sets."""
    if len(series) < 2:
        raise ValueError("need at least two timesteps")
    n = len(series)
    out = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            out[i, j] = out[j, i] = jaccard(series[i], series[j])
    return out


@dataclass(frozen=True)
class ChurnSummary:
    per_query: dict[str, float]
    mean: float
    sd: float
    skipped_empty: int = 0


def url_churn(wave_a: dict[str, set], wave_b: dict[str, set]) -> ChurnSummary:
    """Per-query fraction of first-wave URLs still present in the second wave.

    Queries with an empty first-wave URL set carry no fraction and are
    skipped (counted). SD is the population standard deviation.
    """
    shared = sorted(set(wave_a) & set(wave_b))
    if not shared:
        raise ValueError("waves share no queries")
    per_query = {}
    skipped = 0
    for q in shared:
        if not wave_a[q]:
            skipped += 1
            continue
        per_query[q] = len(wave_a[q] & wave_b[q]) / len(wave_a[q])
    if not per_query:
        raise ValueError("no query in the first wave has any URLs")
    values = list(per_query.values())
    mean = sum(values) / len(values)
    sd = statistics.pstdev(values)
    return ChurnSummary(per_query=per_query, mean=mean, sd=sd, skipped_empty=skipped)


def banner_count_bands(total_steps: int) -> list[tuple[int, int, str]]:
    """Banner-count bands for grouping queries: never, three middle bands
    split proportionally, and always."""
    if total_steps < 2:
        raise ValueError("need at least two timesteps to band")
    lo = max(1, round((total_steps - 1) * 20 / 72))
    hi = max(lo + 1, round((total_steps - 1) * 51 / 72))
    return [
        (0, 0, "0"),
        (1, lo, f"1-{lo}"),
        (lo + 1, hi, f"{lo + 1}-{hi}"),
        (hi + 1, total_steps - 1, f"{hi + 1}-{total_steps - 1}"),
        (total_steps, total_steps, str(total_steps)),
    ]


def band_label(count: int, bands: list[tuple[int, int, str]]) -> str:
    for lo, hi, label in bands:
        if lo <= count <= hi:
            return label
    raise ValueError(f"banner count {count} outside all bands")


@dataclass
class StabilityReport:
    """Corpus stability summary: per-query windowed scores, corpus RBO_k per
    window size, banner-count group assignments, and normalization notes."""

    n_queries: int
    window_sizes: tuple[int, ...]
    per_query: dict[str, dict[int, float]]
    corpus: dict[int, float]
    groups: dict[str, str]
    group_corpus: dict[str, dict[int, float]] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n_queries": self.n_queries,
            "window_sizes": list(self.window_sizes),
            "per_query": {q: {str(k): v for k, v in scores.items()} for q, scores in self.per_query.items()},
            "corpus": {str(k): v for k, v in self.corpus.items()},
            "groups": self.groups,
            "group_corpus": {g: {str(k): v for k, v in scores.items()} for g, scores in self.group_corpus.items()},
            "metadata": self.metadata,
        }


def build_stability_report(
    matrices: dict[str, RboMatrix],
    banner_counts: dict[str, int],
    total_steps: int,
    window_max: int,
    depth: Optional[int] = None,
) -> StabilityReport:
    windows = tuple(k for k in range(1, window_max + 1))
    per_query: dict[str, dict[int, float]] = {}
    for query, matrix in sorted(matrices.items()):
        per_query[query] = {
            k: windowed_rbo(matrix, k) for k in windows if k < matrix.timesteps
        }
    corpus = {}
    for k in windows:
        scores = [pq[k] for pq in per_query.values() if k in pq]
        if scores:
            corpus[k] = sum(scores) / len(scores)

    bands = banner_count_bands(total_steps)
    groups = {q: band_label(banner_counts.get(q, 0), bands) for q in per_query}
    group_corpus: dict[str, dict[int, float]] = {}
    for _, _, label in bands:
        members = [q for q, g in groups.items() if g == label]
        if not members:
            continue
        group_scores = {}
        for k in windows:
            scores = [per_query[q][k] for q in members if k in per_query[q]]
            if scores:
                group_scores[k] = sum(scores) / len(scores)
        group_corpus[label] = group_scores

    return StabilityReport(
        n_queries=len(per_query),
        window_sizes=windows,
        per_query=per_query,
        corpus=corpus,
        groups=groups,
        group_corpus=group_corpus,
        metadata={
            "depth": depth,
            "normalization": "divisor 2KT with T = last observed step index; "
            "gap steps excluded before windowing",
            "total_steps": total_steps,
        },
    )
