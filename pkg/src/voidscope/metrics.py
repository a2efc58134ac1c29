"""Domain-level metric tables and per-SERP aggregation."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .serphtml import SerpRecord

DEFAULT_EXCLUDED_PLATFORMS = frozenset({"youtube.com", "facebook.com", "google.com"})
UNRELIABLE_SCORE_CUTOFF = 0.5


class MetricTableError(ValueError):
    """Bad metric table input: out-of-range score or conflicting duplicates."""


@dataclass(frozen=True)
class QualityIndex:
    scores: dict[str, float]
    excluded_platforms: frozenset[str] = DEFAULT_EXCLUDED_PLATFORMS


@dataclass(frozen=True)
class PartisanshipIndex:
    scores: dict[str, float]


@dataclass(frozen=True)
class SeoMetrics:
    backlinks: float = 0.0
    traffic_estimate: float = 0.0
    referring_domains: float = 0.0
    referring_ips: float = 0.0
    edu_backlinks: float = 0.0
    gov_backlinks: float = 0.0


@dataclass(frozen=True)
class SeoIndex:
    metrics: dict[str, SeoMetrics]


def _strip_www(domain: str) -> str:
    return domain[4:] if domain.startswith("www.") else domain


def _load_scored_csv(path: str | Path, lo: float, hi: float) -> dict[str, float]:
    scores: dict[str, float] = {}
    with open(path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            domain = _strip_www(row["domain"].strip().lower())
            score = float(row["score"])
            if not lo <= score <= hi:
                raise MetricTableError(f"score {score} for {domain} outside [{lo}, {hi}]")
            if domain in scores and scores[domain] != score:
                raise MetricTableError(f"conflicting duplicate scores for {domain}")
            scores[domain] = score
    return scores


def load_quality_scores(
    path: str | Path,
    excluded_platforms: frozenset[str] = DEFAULT_EXCLUDED_PLATFORMS,
) -> QualityIndex:
    """Load domain quality scores (CSV: domain,score in [0,1]).

    "www."-prefixed duplicates collapse onto the bare domain; platform
    exclusions apply at aggregation time, so excluded domains keep their
    scores for lookup.
    """
    return QualityIndex(scores=_load_scored_csv(path, 0.0, 1.0), excluded_platforms=excluded_platforms)


def load_partisanship_scores(path: str | Path) -> PartisanshipIndex:
    """Load domain partisanship scores (CSV: domain,score in [-1,1])."""
    return PartisanshipIndex(scores=_load_scored_csv(path, -1.0, 1.0))


def load_seo_metrics(path: str | Path) -> SeoIndex:
    """Load per-domain SEO metrics; all values must be non-negative."""
    fields = ("backlinks", "traffic_estimate", "referring_domains", "referring_ips", "edu_backlinks", "gov_backlinks")
    metrics: dict[str, SeoMetrics] = {}
    with open(path, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            domain = _strip_www(row["domain"].strip().lower())
            values = {}
            for name in fields:
                value = float(row.get(name, 0) or 0)
                if value < 0:
                    raise MetricTableError(f"negative {name} for {domain}")
                values[name] = value
            metrics[domain] = SeoMetrics(**values)
    return SeoIndex(metrics=metrics)


def load_news_domains(path: str | Path) -> frozenset[str]:
    lines = Path(path).read_text("utf-8").splitlines()
    return frozenset(_strip_www(ln.strip().lower()) for ln in lines if ln.strip() and not ln.startswith("#"))


@dataclass(frozen=True)
class SerpAggregate:
    wave_id: str
    step_index: int
    query_text: str
    avg_domain_quality: Optional[float]
    rank_weighted_partisanship: Optional[float]
    news_domain_count: int
    unique_domain_count: int
    unreliable_domain_count: int
    avg_domain_traffic_log10: Optional[float]
    estimated_total_results_log10: Optional[float]

    def to_dict(self) -> dict:
        return {
            "wave_id": self.wave_id,
            "step_index": self.step_index,
            "query_text": self.query_text,
            "avg_domain_quality": self.avg_domain_quality,
            "rank_weighted_partisanship": self.rank_weighted_partisanship,
            "news_domain_count": self.news_domain_count,
            "unique_domain_count": self.unique_domain_count,
            "unreliable_domain_count": self.unreliable_domain_count,
            "avg_domain_traffic_log10": self.avg_domain_traffic_log10,
            "estimated_total_results_log10": self.estimated_total_results_log10,
        }

    @staticmethod
    def from_dict(d: dict) -> "SerpAggregate":
        return SerpAggregate(**d)


def rank_weight(rank: int) -> float:
    """Discounted-gain weight for rank-weighted averages."""
    return 1.0 / math.log2(rank + 1)


def aggregate_serp(
    serp: SerpRecord,
    quality: QualityIndex,
    partisanship: PartisanshipIndex,
    seo: SeoIndex,
    news_list: frozenset[str],
    unique_domains: bool = False,
) -> SerpAggregate:
    """Compute per-SERP aggregates over all parsed results.

    Quality is a simple mean over scored, non-platform domains; by default
    every result instance counts (a domain appearing three times counts
    three times); unique_domains=True switches to one vote per domain.
    Missing metrics simply leave the corresponding field absent.
    """
    instances = [(r.rank, r.domain) for r in serp.results if r.domain]

    quality_pool = instances
    if unique_domains:
        seen: dict[str, int] = {}
        for rank, domain in instances:
            seen.setdefault(domain, rank)
        quality_pool = [(rank, domain) for domain, rank in seen.items()]

    quality_vals = [
        quality.scores[d]
        for _, d in quality_pool
        if d in quality.scores and d not in quality.excluded_platforms
    ]
    avg_quality = sum(quality_vals) / len(quality_vals) if quality_vals else None

    part_pairs = [(rank_weight(rank), partisanship.scores[d]) for rank, d in instances if d in partisanship.scores]
    if part_pairs:
        wsum = sum(w for w, _ in part_pairs)
        rank_weighted = sum(w * s for w, s in part_pairs) / wsum
    else:
        rank_weighted = None

    traffic_vals = [
        math.log10(1.0 + seo.metrics[d].traffic_estimate) for _, d in instances if d in seo.metrics
    ]
    avg_traffic = sum(traffic_vals) / len(traffic_vals) if traffic_vals else None

    est = serp.estimated_total_results
    return SerpAggregate(
        wave_id=serp.wave_id,
        step_index=serp.step_index,
        query_text=serp.query_text,
        avg_domain_quality=avg_quality,
        rank_weighted_partisanship=rank_weighted,
        news_domain_count=sum(1 for _, d in instances if d in news_list),
        unique_domain_count=len({d for _, d in instances}),
        unreliable_domain_count=sum(
            1 for _, d in instances if d in quality.scores and quality.scores[d] < UNRELIABLE_SCORE_CUTOFF
        ),
        avg_domain_traffic_log10=avg_traffic,
        estimated_total_results_log10=math.log10(1.0 + est) if est is not None else None,
    )
