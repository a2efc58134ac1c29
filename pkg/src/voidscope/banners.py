"""Warning-banner phrase classification.

Detection of the banner region is structural (see serphtml); this module
only decides which known banner family a region's text belongs to. Matching
is tolerant of case, whitespace, and curly-apostrophe variants so phrasing
tweaks around the fixed core do not break classification.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class BannerType(str, Enum):
    NONE = "none"
    LOW_QUALITY = "low_quality"
    LOW_RELEVANCE_MANY = "low_relevance_many"
    LOW_RELEVANCE_ANY = "low_relevance_any"
    LOW_RELEVANCE_NO_MATCHES = "low_relevance_no_matches"
    RAPIDLY_CHANGING = "rapidly_changing"
    OTHER = "other"


@dataclass(frozen=True)
class BannerObservation:
    banner_type: BannerType
    banner_text: str = ""

    def to_dict(self) -> dict:
        return {"banner_type": self.banner_type.value, "banner_text": self.banner_text}

    @staticmethod
    def from_dict(d: dict) -> "BannerObservation":
        return BannerObservation(BannerType(d["banner_type"]), d.get("banner_text", ""))


_RE_QUALITY = re.compile(r"aren't (many|any) great results")
_RE_RELEVANCE = re.compile(r"aren't (many|any) great matches")
_RE_NO_MATCHES = re.compile(r"did not match any documents")
_RE_CHANGING = re.compile(r"results below are changing quickly")


def _normalize(text: str) -> str:
    text = text.replace("’", "'").replace("‘", "'")
    return re.sub(r"\s+", " ", text).strip().lower()


def classify_banner(banner_text: str) -> BannerType:
    """Map extracted banner text to its banner family.

    Empty text means no banner; recognizable text maps to one of the five
    known families; anything else is OTHER and should be surfaced as a
    diagnostic rather than dropped.
    """
    text = _normalize(banner_text)
    if not text:
        return BannerType.NONE
    if _RE_NO_MATCHES.search(text):
        return BannerType.LOW_RELEVANCE_NO_MATCHES
    if _RE_CHANGING.search(text):
        return BannerType.RAPIDLY_CHANGING
    if _RE_QUALITY.search(text):
        return BannerType.LOW_QUALITY
    m = _RE_RELEVANCE.search(text)
    if m:
        if m.group(1) == "many":
            return BannerType.LOW_RELEVANCE_MANY
        return BannerType.LOW_RELEVANCE_ANY
    return BannerType.OTHER
