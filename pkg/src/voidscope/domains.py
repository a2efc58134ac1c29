"""Registrable-domain extraction and URL canonicalization."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path
from urllib.parse import urlsplit, urlunsplit


class InvalidUrlError(ValueError):
    """Raised for inputs that are not absolute http(s) URLs with a host."""


class SuffixTable:
    """Public-suffix rule table supporting wildcard and exception rules.

    The registrable domain is the public suffix plus one preceding label;
    hosts with no matching rule fall back to the implicit single-label rule.
    """

    def __init__(self, rules: list[str]):
        self.exact: set[tuple[str, ...]] = set()
        self.wildcard: set[tuple[str, ...]] = set()
        self.exception: set[tuple[str, ...]] = set()
        for rule in rules:
            rule = rule.strip().lower()
            if not rule or rule.startswith("//"):
                continue
            if rule.startswith("!"):
                self.exception.add(tuple(rule[1:].split(".")))
            elif rule.startswith("*."):
                self.wildcard.add(tuple(rule[2:].split(".")))
            else:
                self.exact.add(tuple(rule.split(".")))

    def public_suffix_length(self, labels: tuple[str, ...]) -> int:
        """Label count of the public suffix of a host, per rule precedence."""
        best = 1  # implicit '*' rule
        for start in range(len(labels)):
            tail = labels[start:]
            if tail in self.exception:
                return len(tail) - 1
            if tail in self.exact:
                best = max(best, len(tail))
            if len(tail) >= 2 and tail[1:] in self.wildcard:
                best = max(best, len(tail))
        return best

    def registrable(self, host: str) -> str:
        labels = tuple(host.split("."))
        n = self.public_suffix_length(labels)
        if n >= len(labels):
            return host  # host is itself a public suffix; best effort
        return ".".join(labels[-(n + 1):])


@lru_cache(maxsize=1)
def default_suffix_table() -> SuffixTable:
    text = resources.files("voidscope.data").joinpath("public_suffixes.dat").read_text("utf-8")
    return SuffixTable(text.splitlines())


def load_suffix_table(path: str | Path) -> SuffixTable:
    return SuffixTable(Path(path).read_text("utf-8").splitlines())


def _host_of(url: str) -> str:
    try:
        parts = urlsplit(url)
    except ValueError as exc:
        raise InvalidUrlError(url) from exc
    if parts.scheme not in ("http", "https") or not parts.hostname:
        raise InvalidUrlError(url)
    return parts.hostname.rstrip(".").lower()


def extract_domain(url: str, table: SuffixTable | None = None) -> str:
    """Registrable (second+top level) domain of an absolute URL, lower-case,
    with any "www." prefix stripped."""
    host = _host_of(url)
    if host.startswith("www."):
        host = host[4:]
    if not host:
        raise InvalidUrlError(url)
    if table is None:
        table = default_suffix_table()
    return table.registrable(host)


def canonical_url(url: str) -> str:
    """Canonical form used for URL set membership: lower-case scheme and
    host, fragment stripped, path and query kept verbatim."""
    try:
        parts = urlsplit(url)
    except ValueError as exc:
        raise InvalidUrlError(url) from exc
    if not parts.scheme or not parts.netloc:
        raise InvalidUrlError(url)
    return urlunsplit((parts.scheme.lower(), parts.netloc.lower(), parts.path, parts.query, ""))
