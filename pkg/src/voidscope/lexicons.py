"""Dictionary-based topic tagging for political and conspiracy terms."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .queries import Query, TopicTags

FAMILIES = ("political", "conspiracy")


class EmptyLexiconError(ValueError):
    """No usable terms were loaded; almost always a configuration problem."""


@dataclass(frozen=True)
class Lexicon:
    id: str
    family: str
    terms: tuple[str, ...]
    category: str = ""
    # term -> all matchable variants (hashtag, de-hashed, spaced forms)
    variants: dict[str, tuple[str, ...]] = None  # type: ignore[assignment]


def _term_variants(term: str, spaced_form: str) -> tuple[str, ...]:
    variants = [term]
    if term.startswith("#"):
        variants.append(term[1:])
    if spaced_form and spaced_form not in variants:
        variants.append(spaced_form)
    return tuple(dict.fromkeys(v for v in variants if v))


def load_lexicons(path: str | Path | None = None) -> list[Lexicon]:
    """Load lexicons from CSV (columns: lexicon_id, family, category, term,
    spaced_form, excluded). Terms are lower-cased and deduplicated; excluded
    rows are dropped entirely.
    """
    if path is None:
        fh = resources.files("voidscope.data").joinpath("lexicons.csv").open("r", encoding="utf-8")
    else:
        fh = open(path, encoding="utf-8")
    grouped: dict[tuple[str, str, str], dict[str, tuple[str, ...]]] = {}
    with fh:
        for row in csv.DictReader(fh):
            if row["excluded"].strip().lower() in ("true", "1", "yes"):
                continue
            family = row["family"].strip().lower()
            if family not in FAMILIES:
                raise ValueError(f"unknown lexicon family: {family!r}")
            term = row["term"].strip().lower()
            if not term:
                continue
            key = (row["lexicon_id"].strip(), family, row["category"].strip())
            grouped.setdefault(key, {})[term] = _term_variants(
                term, row.get("spaced_form", "").strip().lower()
            )
    lexicons = [
        Lexicon(id=lid, family=family, category=category, terms=tuple(terms), variants=terms)
        for (lid, family, category), terms in grouped.items()
    ]
    if not any(lex.terms for lex in lexicons):
        raise EmptyLexiconError("no lexicon terms loaded")
    return lexicons


def _boundary_pattern(variant: str) -> re.Pattern:
    # \b misbehaves around '#' and '/'; explicit word-char lookarounds instead
    return re.compile(r"(?<!\w)" + re.escape(variant) + r"(?!\w)")


class LexiconMatcher:
    """Compiled phrase matcher over a set of lexicons; reusable across queries."""

    def __init__(self, lexicons: list[Lexicon]):
        if not lexicons or not any(lex.terms for lex in lexicons):
            raise EmptyLexiconError("no lexicon terms loaded")
        self._entries: list[tuple[str, str, str, re.Pattern]] = []
        for lex in lexicons:
            for term, variants in lex.variants.items():
                for variant in variants:
                    self._entries.append((lex.id, lex.family, term, _boundary_pattern(variant)))

    def tag(self, text: str) -> TopicTags:
        lowered = text.lower()
        matched: dict[tuple[str, str], str] = {}
        for lex_id, family, term, pattern in self._entries:
            if (lex_id, term) in matched:
                continue
            if pattern.search(lowered):
                matched[(lex_id, term)] = family
        families = set(matched.values())
        return TopicTags(
            political="political" in families,
            conspiracy="conspiracy" in families,
            matched_terms=tuple(sorted(matched)),
        )


def tag_lexicons(q: Query, lexicons: list[Lexicon]) -> TopicTags:
    """Case-insensitive phrase matching of lexicon terms over the query text."""
    return LexiconMatcher(lexicons).tag(q.text)
