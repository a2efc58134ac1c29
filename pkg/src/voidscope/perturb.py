"""Deterministic query perturbations for banner-stability probes.

Three perturbation kinds are supported: pluralizing the trailing noun,
keyboard typos injected per character with a fixed probability, and toggling
surrounding quotation marks. All output is a pure function of (query, kinds,
seed).
"""

from __future__ import annotations

import random
from typing import Iterable, Union

from .queries import Query, normalize_query

KIND_ORDER = ("pluralize", "typo", "quote_toggle")

_IRREGULAR_PLURALS = {
    "man": "men",
    "woman": "women",
    "child": "children",
    "person": "people",
    "foot": "feet",
    "tooth": "teeth",
    "mouse": "mice",
    "goose": "geese",
    "life": "lives",
    "leaf": "leaves",
}

# neighboring keys on a US QWERTY layout, lower-case letters only
_QWERTY_NEIGHBORS = {
    "q": "wa", "w": "qes", "e": "wrd", "r": "etf", "t": "ryg", "y": "tuh",
    "u": "yij", "i": "uok", "o": "ipl", "p": "ol",
    "a": "qsz", "s": "awdx", "d": "sefc", "f": "drgv", "g": "fthb",
    "h": "gyjn", "j": "hukm", "k": "jil", "l": "kop",
    "z": "asx", "x": "zsdc", "c": "xdfv", "v": "cfgb", "b": "vghn",
    "n": "bhjm", "m": "njk",
}

Kind = Union[str, tuple[str, float]]


def pluralize_word(word: str) -> str:
    lower = word.lower()
    if lower in _IRREGULAR_PLURALS:
        plural = _IRREGULAR_PLURALS[lower]
        return plural.capitalize() if word[0].isupper() else plural
    if lower.endswith(("ss", "x", "z", "ch", "sh")):
        return word + "es"
    if lower.endswith("y") and len(lower) > 1 and lower[-2] not in "aeiou":
        return word[:-1] + "ies"
    if lower.endswith("s"):
        return word  # already plural-looking
    return word + "s"


def pluralize_text(text: str) -> str:
    """Pluralize the trailing all-letter token; operators and URLs untouched."""
    chunks = text.split()
    for i in range(len(chunks) - 1, -1, -1):
        stripped = chunks[i].strip("\"'()")
        if stripped.isalpha():
            chunks[i] = chunks[i].replace(stripped, pluralize_word(stripped), 1)
            break
    return " ".join(chunks)


def typo_text(text: str, p: float, rng: random.Random) -> str:
    out = []
    for ch in text:
        neighbors = _QWERTY_NEIGHBORS.get(ch.lower())
        if neighbors and p > 0 and rng.random() < p:
            swap = rng.choice(neighbors)
            out.append(swap.upper() if ch.isupper() else swap)
        else:
            out.append(ch)
    return "".join(out)


def quote_toggle_text(text: str) -> str:
    if len(text) >= 2 and text.startswith('"') and text.endswith('"'):
        return text[1:-1]
    return f'"{text}"'


def generate_perturbations(q: Query, kinds: Iterable[Kind], seed: int) -> list[Query]:
    """Produce one perturbed Query per requested kind, in canonical order.

    Kinds: "pluralize", "quote_toggle", and "typo" or ("typo", p) with
    p in [0, 1] (default 0.1). Same (q, kinds, seed) always yields the same
    list.
    """
    requested: dict[str, float] = {}
    for kind in kinds:
        if isinstance(kind, tuple):
            name, p = kind
        else:
            name, p = kind, 0.1
        if name not in KIND_ORDER:
            raise ValueError(f"unknown perturbation kind: {name!r}")
        if name == "typo" and not 0.0 <= p <= 1.0:
            raise ValueError(f"typo probability out of range: {p}")
        requested[name] = p

    out = []
    for name in KIND_ORDER:
        if name not in requested:
            continue
        if name == "pluralize":
            out.append(normalize_query(pluralize_text(q.text)))
        elif name == "typo":
            rng = random.Random(seed)
            out.append(normalize_query(typo_text(q.text, requested[name], rng)))
        else:
            out.append(normalize_query(quote_toggle_text(q.text)))
    return out
