"""Data-void classification and prevalence reporting.

A SERP can be called a data void three ways: a low-quality banner was
observed on it, its average domain quality falls at or below a threshold,
or a trained model flags it with high confidence. The report keeps raw
counts only and derives every rate on demand, so rates can never drift from
the counts that back them.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .banners import BannerType
from .metrics import SerpAggregate

QUALITY_VOID_THRESHOLD = 0.5
MODEL_CONFIDENCE_THRESHOLD = 0.9


def classify_void_by_quality(
    agg: SerpAggregate | float | None,
    threshold: float = QUALITY_VOID_THRESHOLD,
    inclusive: bool = True,
) -> Optional[bool]:
    """Void when average domain quality is at or below the threshold
    (inclusive boundary by default); absent when no domain was scored."""
    value = agg.avg_domain_quality if isinstance(agg, SerpAggregate) else agg
    if value is None:
        return None
    return value <= threshold if inclusive else value < threshold


def classify_void_by_model(
    confidence: float, threshold: float = MODEL_CONFIDENCE_THRESHOLD
) -> bool:
    """Void when model confidence meets or exceeds the threshold."""
    if not 0.0 <= confidence <= 1.0:
        raise ValueError(f"confidence {confidence} outside [0, 1]")
    return confidence >= threshold


@dataclass(frozen=True)
class VoidLabel:
    query_id: str
    banner_type: BannerType
    by_quality: Optional[bool] = None
    by_model: Optional[bool] = None
    model_confidence: Optional[float] = None

    @property
    def by_banner(self) -> bool:
        return self.banner_type == BannerType.LOW_QUALITY

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "banner_type": self.banner_type.value,
            "by_banner": self.by_banner,
            "by_quality": self.by_quality,
            "by_model": self.by_model,
            "model_confidence": self.model_confidence,
        }


def make_void_label(
    query_id: str,
    banner_type: BannerType,
    agg: Optional[SerpAggregate] = None,
    model_confidence: Optional[float] = None,
    quality_threshold: float = QUALITY_VOID_THRESHOLD,
    model_threshold: float = MODEL_CONFIDENCE_THRESHOLD,
    inclusive_quality: bool = True,
) -> VoidLabel:
    by_quality = classify_void_by_quality(agg, quality_threshold, inclusive_quality) if agg else None
    by_model = (
        classify_void_by_model(model_confidence, model_threshold)
        if model_confidence is not None
        else None
    )
    return VoidLabel(query_id, banner_type, by_quality, by_model, model_confidence)


VOID_DEFINITIONS = ("banner", "quality", "model")

_BANNER_TABLE_ROWS = (
    ("No banner", lambda c: c.get(BannerType.NONE, 0)),
    ("Any banner", lambda c: sum(v for t, v in c.items() if t != BannerType.NONE)),
    (
        "Low-relevance (all)",
        lambda c: c.get(BannerType.LOW_RELEVANCE_MANY, 0)
        + c.get(BannerType.LOW_RELEVANCE_ANY, 0)
        + c.get(BannerType.LOW_RELEVANCE_NO_MATCHES, 0),
    ),
    ("Low-relevance (not many great matches)", lambda c: c.get(BannerType.LOW_RELEVANCE_MANY, 0)),
    ("Low-relevance (not any great matches)", lambda c: c.get(BannerType.LOW_RELEVANCE_ANY, 0)),
    ("Low-relevance (no matches)", lambda c: c.get(BannerType.LOW_RELEVANCE_NO_MATCHES, 0)),
    ("Low-quality", lambda c: c.get(BannerType.LOW_QUALITY, 0)),
    ("Rapidly-changing", lambda c: c.get(BannerType.RAPIDLY_CHANGING, 0)),
    ("Other", lambda c: c.get(BannerType.OTHER, 0)),
)


@dataclass(frozen=True)
class Extrapolation:
    daily_searches: float
    void_rate: float
    banner_rate: float

    @property
    def daily_voids(self) -> float:
        return self.daily_searches * self.void_rate

    @property
    def daily_bannered_voids(self) -> float:
        return self.daily_voids * self.banner_rate


@dataclass
class PrevalenceReport:
    wave_id: str
    total: int
    banner_counts: dict[BannerType, int]
    void_counts: dict[str, int]          # definition -> voids
    defined_counts: dict[str, int]       # definition -> SERPs where defined
    bannered_and_void: dict[str, int]    # definition -> low-quality banner ∧ void
    extrapolation: Optional[Extrapolation] = None

    def banner_rate(self, banner_type: BannerType) -> float:
        return self.banner_counts.get(banner_type, 0) / self.total

    def void_rate(self, definition: str) -> float:
        return self.void_counts[definition] / self.total

    def coverage_of_voids(self, definition: str) -> Optional[float]:
        """Fraction of voids that carried a low-quality banner."""
        voids = self.void_counts[definition]
        return self.bannered_and_void[definition] / voids if voids else None

    def coverage_of_banners(self, definition: str) -> Optional[float]:
        """Fraction of low-quality-bannered SERPs that are voids."""
        bannered = self.banner_counts.get(BannerType.LOW_QUALITY, 0)
        return self.bannered_and_void[definition] / bannered if bannered else None

    def to_dict(self) -> dict:
        out = {
            "wave_id": self.wave_id,
            "total": self.total,
            "banner_counts": {t.value: n for t, n in sorted(self.banner_counts.items())},
            "banner_rates": {t.value: self.banner_rate(t) for t in sorted(self.banner_counts)},
            "void_counts": dict(self.void_counts),
            "defined_counts": dict(self.defined_counts),
            "void_rates": {d: self.void_rate(d) for d in VOID_DEFINITIONS},
            "bannered_and_void": dict(self.bannered_and_void),
            "coverage_of_voids": {d: self.coverage_of_voids(d) for d in VOID_DEFINITIONS},
            "coverage_of_banners": {d: self.coverage_of_banners(d) for d in VOID_DEFINITIONS},
        }
        if self.extrapolation is not None:
            out["extrapolation"] = {
                "daily_searches": self.extrapolation.daily_searches,
                "void_rate": self.extrapolation.void_rate,
                "banner_rate": self.extrapolation.banner_rate,
                "daily_voids": self.extrapolation.daily_voids,
                "daily_bannered_voids": self.extrapolation.daily_bannered_voids,
            }
        return out

    def render_table(self) -> str:
        """Banner counts with percentages of all SERPs, 4 decimal places."""
        lines = [f"Warning banners for wave {self.wave_id or '(unnamed)'} ({self.total:,} SERPs)"]
        for label, counter in _BANNER_TABLE_ROWS:
            count = counter(self.banner_counts)
            if count == 0 and label in ("Low-relevance (no matches)", "Other"):
                continue
            lines.append(f"{label:<42}{count:>12,}  ({100.0 * count / self.total:.4f}%)")
        return "\n".join(lines)


def prevalence_report(
    labels: Iterable[VoidLabel],
    extrapolation: Optional[tuple[float, float, float]] = None,
    wave_id: str = "",
) -> PrevalenceReport:
    """Tally banner and void prevalence over labeled SERPs.

    Undefined void labels (no scored domains, no model confidence) count
    toward neither side of that definition's rate; the defined_counts block
    records how many SERPs each definition actually covered.
    """
    total = 0
    banner_counts: dict[BannerType, int] = {}
    void_counts = {d: 0 for d in VOID_DEFINITIONS}
    defined = {d: 0 for d in VOID_DEFINITIONS}
    bannered_and_void = {d: 0 for d in VOID_DEFINITIONS}
    for label in labels:
        total += 1
        banner_counts[label.banner_type] = banner_counts.get(label.banner_type, 0) + 1
        flags = {"banner": label.by_banner, "quality": label.by_quality, "model": label.by_model}
        for definition, flag in flags.items():
            if flag is None:
                continue
            defined[definition] += 1
            if flag:
                void_counts[definition] += 1
                if label.by_banner:
                    bannered_and_void[definition] += 1
    if total == 0:
        raise ValueError("empty dataset")
    extra = Extrapolation(*extrapolation) if extrapolation is not None else None
    return PrevalenceReport(
        wave_id=wave_id,
        total=total,
        banner_counts=banner_counts,
        void_counts=void_counts,
        defined_counts=defined,
        bannered_and_void=bannered_and_void,
        extrapolation=extra,
    )


def read_confidence_csv(path: str | Path) -> list[tuple[str, float]]:
    """Read a (query_id, confidence) CSV in file order; values validated."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"query_id", "confidence"} <= set(reader.fieldnames):
            raise ValueError("confidence CSV must have query_id and confidence columns")
        for row in reader:
            confidence = float(row["confidence"])
            if not 0.0 <= confidence <= 1.0:
                raise ValueError(f"confidence {confidence} outside [0, 1] for {row['query_id']!r}")
            rows.append((row["query_id"], confidence))
    return rows
