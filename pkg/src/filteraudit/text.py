"""Shared text primitives: surface normalization and offset-preserving tokenization."""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

_WS_RE = re.compile(r"\s+")
_CHUNK_RE = re.compile(r"\S+")


def normalize_surface(s: str) -> str:
    """Casefolded NFC form with whitespace runs collapsed to single spaces."""
    return _WS_RE.sub(" ", unicodedata.normalize("NFC", s).casefold()).strip()


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


@dataclass(frozen=True)
class Token:
    """One word token: [start, end) offsets into the source text plus the
    normalized form used for matching. ``text[start:end]`` is the raw core."""

    start: int
    end: int
    norm: str


def tokenize(text: str) -> list[Token]:
    """Split on Unicode whitespace and strip leading/trailing punctuation.

    Chunks that are punctuation-only are dropped. Offsets always index the
    original ``text``; only ``norm`` is casefolded/NFC-normalized.
    """
    tokens: list[Token] = []
    for m in _CHUNK_RE.finditer(text):
        start, end = m.start(), m.end()
        while start < end and _is_punct(text[start]):
            start += 1
        while end > start and _is_punct(text[end - 1]):
            end -= 1
        if start >= end:
            continue
        core = unicodedata.normalize("NFC", text[start:end]).casefold()
        tokens.append(Token(start, end, core))
    return tokens


def norm_tokens(s: str) -> tuple[str, ...]:
    """Normalized token sequence of a surface form (gazetteer/lexicon key shape)."""
    return tuple(t.norm for t in tokenize(normalize_surface(s)))
