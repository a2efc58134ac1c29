"""Parse raw SERP HTML into structured records.

The parser targets the fixture-corpus markup conventions (documented in the
README): result blocks are ``<div class="g">`` with an optional
``data-rtype`` attribute, the banner region is a block whose class list
contains ``serp-banner`` or ``banner-card``, and the result-count estimate
lives in ``<div id="result-stats">``. Pages with none of those landmarks are
rejected so callers quarantine them instead of silently emitting empties.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from html.parser import HTMLParser
from typing import Optional

from .banners import BannerObservation, classify_banner
from .domains import InvalidUrlError, extract_domain

BANNER_CLASSES = {"serp-banner", "banner-card"}
TRUNCATION_PHRASE = "limit queries to 32 words"


class UnparseableHtmlError(ValueError):
    """Page structure was not recognized as a SERP."""


class ResultType(str, Enum):
    ORGANIC = "organic"
    NEWS = "news"
    VIDEO = "video"
    AD = "ad"
    OTHER = "other"


@dataclass(frozen=True)
class SearchResult:
    rank: int
    url: str
    title: str
    result_type: ResultType
    domain: str

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "url": self.url,
            "title": self.title,
            "result_type": self.result_type.value,
            "domain": self.domain,
        }

    @staticmethod
    def from_dict(d: dict) -> "SearchResult":
        return SearchResult(d["rank"], d["url"], d["title"], ResultType(d["result_type"]), d["domain"])


@dataclass(frozen=True)
class SerpRecord:
    query_text: str
    fetched_at: str
    wave_id: str
    step_index: int
    results: tuple[SearchResult, ...]
    banner: BannerObservation
    estimated_total_results: Optional[int] = None
    truncation_notice: bool = False

    def organic_results(self) -> list[SearchResult]:
        return [r for r in self.results if r.result_type != ResultType.AD]

    def to_dict(self) -> dict:
        return {
            "query_text": self.query_text,
            "fetched_at": self.fetched_at,
            "wave_id": self.wave_id,
            "step_index": self.step_index,
            "results": [r.to_dict() for r in self.results],
            "banner": self.banner.to_dict(),
            "estimated_total_results": self.estimated_total_results,
            "truncation_notice": self.truncation_notice,
        }

    @staticmethod
    def from_dict(d: dict) -> "SerpRecord":
        return SerpRecord(
            query_text=d["query_text"],
            fetched_at=d["fetched_at"],
            wave_id=d["wave_id"],
            step_index=d["step_index"],
            results=tuple(SearchResult.from_dict(r) for r in d["results"]),
            banner=BannerObservation.from_dict(d["banner"]),
            estimated_total_results=d.get("estimated_total_results"),
            truncation_notice=d.get("truncation_notice", False),
        )


# thousands separators: comma, period, thin/no-break/regular spaces
_COUNT_RE = re.compile(r"(?:about\s+)?([0-9][0-9.,    ]*?)\s*results?", re.I)


def parse_result_count(stats_text: str) -> Optional[int]:
    """Parse locale-formatted result-count strings like "About 1,230,000 results"."""
    m = _COUNT_RE.search(stats_text)
    if not m:
        return None
    digits = re.sub(r"[.,    ]", "", m.group(1))
    return int(digits) if digits else None


@dataclass
class _Block:
    tag: str
    kind: str  # "result" | "banner" | "stats" | ""
    rtype: str = "organic"
    href: str = ""
    title_parts: list[str] = field(default_factory=list)
    text_parts: list[str] = field(default_factory=list)
    in_title: bool = False
    seen_anchor: bool = False


class _SerpHTMLParser(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.stack: list[_Block] = []
        self.results: list[tuple[str, str, str]] = []  # (url, title, rtype)
        self.banner_texts: list[str] = []
        self.stats_text = ""
        self.all_text: list[str] = []
        self.landmarks = 0

    def _classes(self, attrs: dict) -> set[str]:
        return set((attrs.get("class") or "").split())

    def handle_starttag(self, tag, attrs):
        attrs = dict(attrs)
        classes = self._classes(attrs)
        kind = ""
        if tag == "div" and "g" in classes:
            kind = "result"
            self.landmarks += 1
        elif classes & BANNER_CLASSES:
            kind = "banner"
            self.landmarks += 1
        elif tag == "div" and attrs.get("id") == "result-stats":
            kind = "stats"
            self.landmarks += 1
        block = _Block(tag=tag, kind=kind, rtype=attrs.get("data-rtype", "organic"))
        if kind == "result":
            self.stack.append(block)
        elif kind in ("banner", "stats"):
            self.stack.append(block)
        else:
            # inside a result block, watch for the anchor and its h3 title
            self.stack.append(block)
            owner = self._current("result")
            if owner is not None:
                if tag == "a" and not owner.seen_anchor and attrs.get("href"):
                    owner.href = attrs["href"]
                    owner.seen_anchor = True
                elif tag == "h3":
                    owner.in_title = True

    def handle_endtag(self, tag):
        # tolerate stray end tags from malformed markup
        idx = next((i for i in range(len(self.stack) - 1, -1, -1) if self.stack[i].tag == tag), None)
        if idx is None:
            return
        closing = self.stack[idx]
        del self.stack[idx:]
        owner = self._current("result")
        if tag == "h3" and owner is not None:
            owner.in_title = False
        if closing.kind == "result":
            if closing.href:
                self.results.append((closing.href, " ".join(closing.title_parts).strip(), closing.rtype))
        elif closing.kind == "banner":
            self.banner_texts.append(" ".join(closing.text_parts).strip())
        elif closing.kind == "stats":
            self.stats_text = " ".join(closing.text_parts).strip()

    def handle_data(self, data):
        if not data.strip():
            return
        self.all_text.append(data)
        owner = self._current("result")
        if owner is not None and owner.in_title:
            owner.title_parts.append(data.strip())
        for kind in ("banner", "stats"):
            blk = self._current(kind)
            if blk is not None:
                blk.text_parts.append(data.strip())

    def _current(self, kind: str) -> Optional[_Block]:
        for block in reversed(self.stack):
            if block.kind == kind:
                return block
        return None


def parse_serp(
    html: str | bytes,
    *,
    query_text: str = "",
    fetched_at: str = "",
    wave_id: str = "",
    step_index: int = 0,
) -> SerpRecord:
    """Parse one fetched SERP page into a SerpRecord.

    Raises UnparseableHtmlError when no SERP landmark (result block, banner
    region, or result-stats) is present; callers should quarantine such
    blobs with a diagnostic.
    """
    if isinstance(html, bytes):
        html = html.decode("utf-8", errors="replace")
    parser = _SerpHTMLParser()
    parser.feed(html)
    parser.close()
    if parser.landmarks == 0:
        raise UnparseableHtmlError("no SERP landmarks found")

    results = []
    for rank, (url, title, rtype) in enumerate(parser.results, start=1):
        try:
            domain = extract_domain(url)
        except InvalidUrlError:
            domain = ""
        try:
            result_type = ResultType(rtype)
        except ValueError:
            result_type = ResultType.OTHER
        results.append(SearchResult(rank=rank, url=url, title=title, result_type=result_type, domain=domain))

    banner_text = next((t for t in parser.banner_texts if t), "")
    banner = BannerObservation(classify_banner(banner_text), banner_text)

    page_text = " ".join(parser.all_text)
    return SerpRecord(
        query_text=query_text,
        fetched_at=fetched_at,
        wave_id=wave_id,
        step_index=step_index,
        results=tuple(results),
        banner=banner,
        estimated_total_results=parse_result_count(parser.stats_text),
        truncation_notice=TRUNCATION_PHRASE in page_text,
    )
