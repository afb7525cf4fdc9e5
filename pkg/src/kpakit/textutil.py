"""Shared text primitives: tokenization, sentence splitting, topic slugs.

Every module that counts, hashes, or compares tokens goes through
:func:`tokenize` so that token boundaries agree across the whole pipeline.
"""

from __future__ import annotations

import re

# ASCII punctuation plus common typographic marks. Stripped from token edges
# only, so internal hyphens and apostrophes survive ("well-known", "don't").
_EDGE_PUNCT = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~“”‘’«»…–—"


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Whitespace tokens with enclosing punctuation stripped, empties dropped."""
    tokens: list[str] = []
    for raw in text.split():
        tok = raw.strip(_EDGE_PUNCT)
        if not tok:
            continue
        tokens.append(tok.lower() if lowercase else tok)
    return tokens


# A period does not end a sentence when the token before it is one of these
# (compared lowercase, with any quoting stripped). Deliberately conservative:
# a short list of unambiguous abbreviations beats a clever heuristic here.
ABBREVIATIONS = frozenset({
    "e.g", "i.e", "etc", "cf", "al", "approx",
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs",
    "dept", "inc", "ltd", "fig", "vol",
})

_BOUNDARY = re.compile(r"([.!?]+)(\s+|$)")
_QUOTES = "\"'()[]“”‘’"


def split_sentences(text: str) -> list[str]:
    """Rule-based sentence split on ``.``/``!``/``?`` followed by whitespace or end.

    Keeps the terminator attached to its sentence and refuses to split after
    known abbreviations.
    """
    sentences: list[str] = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        if match.group(1) == ".":
            head = text[start:match.start(1)].rsplit(None, 1)
            last = head[-1] if head else ""
            if last.lower().strip(_QUOTES) in ABBREVIATIONS:
                continue
        chunk = text[start:match.end(1)].strip()
        if chunk:
            sentences.append(chunk)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(text: str) -> str:
    """Lowercase hyphen slug: "Mandatory vaccination?" -> "mandatory-vaccination"."""
    slug = _SLUG_RE.sub("-", text.lower()).strip("-")
    return slug or "topic"
