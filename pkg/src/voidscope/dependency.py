"""URL-dependency explanations for banner presence.

Given a query's timeline of SERPs split into bannered and unbannered sides,
three nested questions are answered exactly:

  Q1  is there a single URL present in every bannered SERP and absent from
      all unbannered SERPs?
  Q2  is there a pair of URLs jointly present in every bannered SERP and
      never jointly present in any unbannered SERP?
  Q3  same as Q2 after partitioning each SERP at a rank cutoff c, so that a
      URL ranked above the cutoff is distinguished from the same URL at or
      below it.

All three return the full witness set, not just existence, since audits
need the witnesses. Pairs are unordered and never pair a URL with itself.
By default a pair is disqualified only by *joint* presence in an unbannered
SERP; independent-presence semantics are available via a flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .banners import BannerType
from .serphtml import SerpRecord

ABOVE_CUTOFF = "above_cutoff"
AT_OR_BELOW_CUTOFF = "at_or_below_cutoff"


@dataclass(frozen=True)
class BannerTimeline:
    query_id: str
    bannered: tuple[tuple[str, ...], ...]  # ranked URL lists, one per bannered SERP
    unbannered: tuple[tuple[str, ...], ...]

    def require_variance(self) -> None:
        if not self.bannered or not self.unbannered:
            raise ValueError(
                f"explanation analysis needs both bannered and unbannered SERPs "
                f"(query {self.query_id!r} has {len(self.bannered)}/{len(self.unbannered)})"
            )


@dataclass(frozen=True)
class RankCutoffCondition:
    cutoff: int
    url_pair: tuple[str, str]
    positions: tuple[str, str]  # parallel to url_pair

    def __post_init__(self):
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")


@dataclass(frozen=True)
class CooccurrenceTally:
    banner_counts: dict[str, int]
    no_banner_counts: dict[str, int]

    def for_url(self, url: str) -> tuple[int, int]:
        return self.banner_counts.get(url, 0), self.no_banner_counts.get(url, 0)


def build_timelines(
    records: Iterable[SerpRecord],
    banner_type: BannerType = BannerType.LOW_QUALITY,
) -> dict[str, BannerTimeline]:
    """Group SERP records by query into banner timelines, ordered by step."""
    grouped: dict[str, list[SerpRecord]] = {}
    for record in records:
        grouped.setdefault(record.query_text, []).append(record)
    timelines = {}
    for query, recs in grouped.items():
        recs.sort(key=lambda r: r.step_index)
        bannered = []
        unbannered = []
        for rec in recs:
            urls = tuple(r.url for r in rec.results)
            if rec.banner.banner_type == banner_type:
                bannered.append(urls)
            else:
                unbannered.append(urls)
        timelines[query] = BannerTimeline(query, tuple(bannered), tuple(unbannered))
    return timelines


def single_url_explanation(t: BannerTimeline) -> set[str]:
    """Q1 witnesses: URLs in the intersection of all bannered SERPs that
    never appear in any unbannered SERP."""
    t.require_variance()
    universal = set(t.bannered[0])
    for serp in t.bannered[1:]:
        universal &= set(serp)
    seen_unbannered = set().union(*map(set, t.unbannered))
    return universal - seen_unbannered


def _joint_pairs(
    universal: set[str],
    unbannered: Sequence[Iterable[str]],
    joint_absence: bool,
) -> set[frozenset]:
    """Pairs drawn from the bannered-universal set, filtered on the
    unbannered side. Pre-filtering to the universal set preserves exactness:
    joint presence in every bannered SERP requires each member to be in the
    intersection."""
    if len(universal) < 2:
        return set()
    if joint_absence:
        forbidden = set()
        for serp in unbannered:
            present = universal & set(serp)
            forbidden.update(frozenset(p) for p in combinations(sorted(present), 2))
        return {frozenset(p) for p in combinations(sorted(universal), 2)} - forbidden
    seen = set().union(*map(set, unbannered)) if unbannered else set()
    allowed = universal - seen
    return {frozenset(p) for p in combinations(sorted(allowed), 2)}


def pair_explanation(t: BannerTimeline, joint_absence: bool = True) -> set[tuple[str, str]]:
    """Q2 witnesses: unordered URL pairs jointly present in every bannered
    SERP and (by default) never jointly present in an unbannered SERP."""
    t.require_variance()
    universal = set(t.bannered[0])
    for serp in t.bannered[1:]:
        universal &= set(serp)
    pairs = _joint_pairs(universal, t.unbannered, joint_absence)
    return {tuple(sorted(p)) for p in pairs}


def tuple_explanation(t: BannerTimeline, size: int, joint_absence: bool = True) -> set[tuple[str, ...]]:
    """Order-``size`` witnesses: URL sets jointly present in every bannered
    SERP and never jointly present in an unbannered SERP.

    size=1 and size=2 coincide with the single-URL and pair questions; the
    plain subset enumeration is exact but not optimized for large sizes.
    """
    if size < 1:
        raise ValueError("witness size must be >= 1")
    t.require_variance()
    if size == 1:
        return {(u,) for u in single_url_explanation(t)}
    universal = set(t.bannered[0])
    for serp in t.bannered[1:]:
        universal &= set(serp)
    if len(universal) < size:
        return set()
    candidates = {frozenset(c) for c in combinations(sorted(universal), size)}
    if joint_absence:
        for serp in t.unbannered:
            present = universal & set(serp)
            if len(present) >= size:
                candidates -= {frozenset(c) for c in combinations(sorted(present), size)}
    else:
        seen = set().union(*map(set, t.unbannered)) if t.unbannered else set()
        candidates = {c for c in candidates if not (c & seen)}
    return {tuple(sorted(c)) for c in candidates}


def _tag_serp(urls: Sequence[str], cutoff: int) -> tuple[str, ...]:
    # ranks are 1-based; "above the cutoff" means rank < c
    return tuple(
        url + "\x00above" if rank < cutoff else url
        for rank, url in enumerate(urls, start=1)
    )


def _untag(tagged: str) -> tuple[str, str]:
    if tagged.endswith("\x00above"):
        return tagged[: -len("\x00above")], ABOVE_CUTOFF
    return tagged, AT_OR_BELOW_CUTOFF


def rank_cutoff_explanation(
    t: BannerTimeline, c: int, joint_absence: bool = True
) -> set[RankCutoffCondition]:
    """Q3 witnesses at cutoff c: pair explanations over SERPs whose URLs are
    split into above-cutoff and at-or-below-cutoff variants."""
    if c < 1:
        raise ValueError("cutoff must be >= 1")
    tagged = BannerTimeline(
        query_id=t.query_id,
        bannered=tuple(_tag_serp(serp, c) for serp in t.bannered),
        unbannered=tuple(_tag_serp(serp, c) for serp in t.unbannered),
    )
    out = set()
    for pair in pair_explanation(tagged, joint_absence=joint_absence):
        (url_a, pos_a), (url_b, pos_b) = _untag(pair[0]), _untag(pair[1])
        if (url_b, pos_b) < (url_a, pos_a):
            (url_a, pos_a), (url_b, pos_b) = (url_b, pos_b), (url_a, pos_a)
        out.add(RankCutoffCondition(cutoff=c, url_pair=(url_a, url_b), positions=(pos_a, pos_b)))
    return out


def cooccurrence_tally(t: BannerTimeline) -> CooccurrenceTally:
    """Per-URL presence counts split by banner status."""
    banner_counts: dict[str, int] = {}
    no_banner_counts: dict[str, int] = {}
    for serp in t.bannered:
        for url in set(serp):
            banner_counts[url] = banner_counts.get(url, 0) + 1
    for serp in t.unbannered:
        for url in set(serp):
            no_banner_counts[url] = no_banner_counts.get(url, 0) + 1
    return CooccurrenceTally(banner_counts=banner_counts, no_banner_counts=no_banner_counts)
