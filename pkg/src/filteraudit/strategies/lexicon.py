"""Lexicon filters: multi-pattern matching of term token sequences.

Terms are normalized token sequences (one or more tokens). The compiled
matcher is an Aho-Corasick automaton over the token alphabet and reports
every occurrence of every term, so a sentence can match one term several
times and several terms at once.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ..ingest.sentences import Sentence
from ..text import norm_tokens
from .base import StrategyVerdict


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class Lexicon:
    name: str
    terms: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        if not self.terms:
            raise LexiconError(f"lexicon {self.name!r} is empty")
        if len(set(self.terms)) != len(self.terms):
            raise LexiconError(f"lexicon {self.name!r} contains duplicate terms")


def parse_lexicon(lines: Iterable[str], name: str) -> Lexicon:
    """One term per line, '#' comments; terms normalized and deduplicated."""
    terms: list[tuple[str, ...]] = []
    seen = set()
    for raw in lines:
        entry = raw.split("#", 1)[0].strip()
        if not entry:
            continue
        tokens = norm_tokens(entry)
        if tokens and tokens not in seen:
            seen.add(tokens)
            terms.append(tokens)
    return Lexicon(name=name, terms=tuple(terms))


def load_lexicon(path: str | Path, name: str | None = None) -> Lexicon:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return parse_lexicon(fh, name or path.stem)


class TokenAutomaton:
    """Aho-Corasick over token sequences; finds all term occurrences."""

    def __init__(self, terms: Sequence[tuple[str, ...]]):
        # state 0 is the root; transitions are dicts keyed by token
        self._next: list[dict[str, int]] = [{}]
        self._fail: list[int] = [0]
        self._out: list[list[tuple[int, str]]] = [[]]
        for term in terms:
            self._insert(term)
        self._build_failure_links()

    def _insert(self, term: tuple[str, ...]) -> None:
        state = 0
        for token in term:
            nxt = self._next[state].get(token)
            if nxt is None:
                nxt = len(self._next)
                self._next[state][token] = nxt
                self._next.append({})
                self._fail.append(0)
                self._out.append([])
            state = nxt
        self._out[state].append((len(term), " ".join(term)))

    def _build_failure_links(self) -> None:
        queue: deque[int] = deque()
        for state in self._next[0].values():
            queue.append(state)
        while queue:
            state = queue.popleft()
            for token, child in self._next[state].items():
                queue.append(child)
                fallback = self._fail[state]
                while fallback and token not in self._next[fallback]:
                    fallback = self._fail[fallback]
                self._fail[child] = self._next[fallback].get(token, 0)
                if self._fail[child] == child:
                    self._fail[child] = 0
                self._out[child] = self._out[child] + self._out[self._fail[child]]

    def find_all(self, tokens: Sequence[str]) -> list[tuple[int, int, str]]:
        """Every (start, end, term) occurrence, ordered by end then start."""
        matches: list[tuple[int, int, str]] = []
        state = 0
        for i, token in enumerate(tokens):
            while state and token not in self._next[state]:
                state = self._fail[state]
            state = self._next[state].get(token, 0)
            for length, term in self._out[state]:
                matches.append((i + 1 - length, i + 1, term))
        return matches


def compile_lexicon(lexicon: Lexicon) -> TokenAutomaton:
    return TokenAutomaton(lexicon.terms)


def lexicon_flag(sentence: Sentence, matcher: TokenAutomaton, *, doc_id: str) -> StrategyVerdict:
    """Sentence verdict: flagged iff any term occurs; every occurrence recorded."""
    norms = [t.norm for t in sentence.tokens]
    matches = matcher.find_all(norms)
    return StrategyVerdict(
        doc_id=doc_id,
        sentence_index=sentence.index,
        flagged=bool(matches),
        matched_terms=tuple(term for _s, _e, term in matches),
    )
