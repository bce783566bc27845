"""Character-trigram language identification.

Self-contained replacement for an external language-ID dependency: cosine
similarity of character-trigram count profiles, built once from small seed
texts bundled per language. Pure function of the input text.
"""
from __future__ import annotations

import math
import re
from functools import lru_cache
from importlib import resources

_WS_RE = re.compile(r"\s+")

#: language code returned when no signal is available
UNKNOWN_LANG = "und"

#: cap on characters profiled per call; long documents are stable well below this
_MAX_CHARS = 4000


def _trigram_counts(text: str) -> dict[str, int]:
    s = " " + _WS_RE.sub(" ", text.casefold()).strip() + " "
    counts: dict[str, int] = {}
    for i in range(len(s) - 2):
        tri = s[i : i + 3]
        counts[tri] = counts.get(tri, 0) + 1
    return counts


class TrigramProfile:
    """Trigram count vector for one language, compared by cosine."""

    def __init__(self, lang: str, counts: dict[str, int]):
        self.lang = lang
        self.counts = counts
        self.norm = math.sqrt(sum(v * v for v in counts.values()))

    @classmethod
    def from_text(cls, lang: str, text: str) -> "TrigramProfile":
        return cls(lang, _trigram_counts(text))

    def cosine(self, other: "TrigramProfile") -> float:
        if self.norm == 0 or other.norm == 0:
            return 0.0
        small, big = self.counts, other.counts
        if len(small) > len(big):
            small, big = big, small
        dot = sum(v * big[k] for k, v in small.items() if k in big)
        return dot / (self.norm * other.norm)


@lru_cache(maxsize=1)
def _reference_profiles() -> tuple[TrigramProfile, ...]:
    seeds = resources.files("filteraudit.data").joinpath("lang_seeds")
    profiles = []
    for entry in sorted(seeds.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".txt"):
            lang = entry.name[:-4]
            profiles.append(TrigramProfile.from_text(lang, entry.read_text("utf-8")))
    return tuple(profiles)


def detect_language(text: str) -> tuple[str, float]:
    """Best-matching language code and its cosine score in [0, 1].

    Empty/whitespace-only text (or text sharing no trigram with any
    reference) yields ("und", 0.0).
    """
    stripped = text.strip()
    if not stripped:
        return (UNKNOWN_LANG, 0.0)
    sample = TrigramProfile.from_text("?", stripped[:_MAX_CHARS])
    best_lang, best_score = UNKNOWN_LANG, 0.0
    for ref in _reference_profiles():
        score = sample.cosine(ref)
        if score > best_score:
            best_lang, best_score = ref.lang, score
    return (best_lang, best_score)
