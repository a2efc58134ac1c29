"""Resolve shared search URLs into (engine, query) search directives."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlsplit


class MalformedUrlError(ValueError):
    """Raised when the input cannot be parsed as an absolute URL."""


@dataclass(frozen=True)
class EngineRule:
    engine: str
    host_fragment: str
    query_params: tuple[str, ...]


@dataclass(frozen=True)
class SearchDirective:
    source_url: str
    engine: str
    raw_query: str
    posted_at: Optional[str] = None


def load_engine_rules(path: str | Path | None = None) -> list[EngineRule]:
    """Load engine recognition rules from the bundled table or a user file.

    File format: ``engine = host_fragment : param[,param...]`` per line.
    """
    if path is None:
        text = resources.files("voidscope.data").joinpath("engine_rules.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            engine, rest = line.split("=", 1)
            fragment, params = rest.split(":", 1)
        except ValueError as exc:
            raise ValueError(f"bad engine rule at line {lineno}: {line!r}") from exc
        rules.append(
            EngineRule(
                engine=engine.strip(),
                host_fragment=fragment.strip().lower(),
                query_params=tuple(p.strip() for p in params.split(",") if p.strip()),
            )
        )
    if not rules:
        raise ValueError("engine rules table is empty")
    return rules


def extract_directive(
    post_url: str,
    engine_rules: list[EngineRule] | None = None,
    posted_at: Optional[str] = None,
) -> Optional[SearchDirective]:
    """Extract a SearchDirective from a shared URL, or None.

    Returns None for URLs on unrecognized hosts, engine homepage links, and
    links whose query parameter is blank. Raises MalformedUrlError only when
    the input is not an absolute URL.
    """
    if engine_rules is None:
        engine_rules = load_engine_rules()
    try:
        parts = urlsplit(post_url.strip())
    except ValueError as exc:
        raise MalformedUrlError(str(post_url)) from exc
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise MalformedUrlError(post_url)

    haystack = (parts.netloc + parts.path).lower()
    rule = next((r for r in engine_rules if r.host_fragment in haystack), None)
    if rule is None:
        return None

    params = parse_qs(parts.query, keep_blank_values=True)
    for name in rule.query_params:
        for value in params.get(name, ()):
            if value.strip():
                return SearchDirective(
                    source_url=post_url,
                    engine=rule.engine,
                    raw_query=value,
                    posted_at=posted_at,
                )
    return None
