"""Rule-based sentence splitting over raw text.

A boundary is a run of [.?!] followed by whitespace and an uppercase letter
or opening quote; a single period is suppressed when the word it closes is a
known abbreviation (``Dr.``, ``U.S.``, ...). Spans index the original text so
the splitter is lossless modulo the separator whitespace.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..text import Token, tokenize

_TERMINALS = ".?!"
_QUOTE_OPENERS = "\"'“‘«"

# Trailing word (including its period) that never ends a sentence.
ABBREVIATIONS = frozenset(
    {
        "dr.", "mr.", "mrs.", "ms.", "prof.", "rev.", "gen.", "sen.", "rep.",
        "st.", "jr.", "sr.", "vs.", "etc.", "e.g.", "i.e.", "cf.", "al.",
        "inc.", "ltd.", "co.", "corp.", "dept.", "est.", "fig.", "no.",
        "u.s.", "u.k.", "u.n.", "d.c.", "a.m.", "p.m.",
    }
)


@dataclass(frozen=True)
class Sentence:
    """One sentence: position, [start, end) span in the source document text,
    the covered text, and its word tokens (offsets relative to ``text``)."""

    index: int
    start: int
    end: int
    text: str
    tokens: tuple[Token, ...]


def _make_sentence(index: int, start: int, end: int, source: str) -> Sentence:
    text = source[start:end]
    return Sentence(index=index, start=start, end=end, text=text, tokens=tuple(tokenize(text)))


def split_sentences(text: str) -> list[Sentence]:
    sentences: list[Sentence] = []
    n = len(text)
    sent_start = 0
    # skip leading whitespace
    while sent_start < n and text[sent_start].isspace():
        sent_start += 1
    i = sent_start
    while i < n:
        if text[i] not in _TERMINALS:
            i += 1
            continue
        run_start = i
        while i + 1 < n and text[i + 1] in _TERMINALS:
            i += 1
        boundary_end = i + 1  # one past the punctuation run
        k = boundary_end
        while k < n and text[k].isspace():
            k += 1
        if k == boundary_end or k >= n:
            i = boundary_end
            continue
        if not (text[k].isupper() or text[k] in _QUOTE_OPENERS):
            i = boundary_end
            continue
        if text[run_start] == "." and run_start == boundary_end - 1:
            w_start = run_start
            while w_start > sent_start and not text[w_start - 1].isspace():
                w_start -= 1
            if text[w_start : run_start + 1].casefold() in ABBREVIATIONS:
                i = boundary_end
                continue
        sentences.append(_make_sentence(len(sentences), sent_start, boundary_end, text))
        sent_start = k
        i = k
    # trailing sentence without a recognized boundary
    end = n
    while end > sent_start and text[end - 1].isspace():
        end -= 1
    if end > sent_start:
        sentences.append(_make_sentence(len(sentences), sent_start, end, text))
    return sentences
