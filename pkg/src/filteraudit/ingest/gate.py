"""Document gates and corpus sampling.

A document is kept when it is English, has at least ``MIN_SENTENCES``
sentences, and averages at least ``MIN_MEAN_TOKENS`` words per sentence
("below 5" drops on both criteria, so exactly 5 passes).
"""
from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .langid import detect_language
from .sentences import Sentence, split_sentences
from .warc import RawDocument

MIN_SENTENCES = 5
MIN_MEAN_TOKENS = 5.0


class GateStatus(Enum):
    KEPT = "kept"
    DROPPED_LANGUAGE = "dropped_language"
    DROPPED_TOO_FEW_SENTENCES = "dropped_too_few_sentences"
    DROPPED_SHORT_SENTENCES = "dropped_short_sentences"


@dataclass
class Document:
    doc_id: str
    sentences: tuple[Sentence, ...]
    lang: str
    gate_status: GateStatus
    url: str | None = None


@dataclass
class GateCounters:
    by_status: dict[str, int] = field(default_factory=dict)

    def bump(self, status: GateStatus) -> None:
        self.by_status[status.value] = self.by_status.get(status.value, 0) + 1

    @property
    def total(self) -> int:
        return sum(self.by_status.values())


def document_gate(
    raw: RawDocument,
    *,
    min_sentences: int = MIN_SENTENCES,
    min_mean_tokens: float = MIN_MEAN_TOKENS,
) -> Document:
    lang, _conf = detect_language(raw.body)
    if lang != "en":
        return Document(raw.doc_id, (), lang, GateStatus.DROPPED_LANGUAGE, raw.url)
    sentences = tuple(split_sentences(raw.body))
    if len(sentences) < min_sentences:
        return Document(raw.doc_id, sentences, lang, GateStatus.DROPPED_TOO_FEW_SENTENCES, raw.url)
    mean_tokens = sum(len(s.tokens) for s in sentences) / len(sentences)
    if mean_tokens < min_mean_tokens:
        return Document(raw.doc_id, sentences, lang, GateStatus.DROPPED_SHORT_SENTENCES, raw.url)
    return Document(raw.doc_id, sentences, lang, GateStatus.KEPT, raw.url)


def sample_corpus(docs: Sequence[Document], n: int, seed: int) -> list[Document]:
    """Uniform sample without replacement, deterministic for (input order, n, seed).

    Selected documents come back in input order. Asking for more than is
    available returns everything with a warning.
    """
    if n >= len(docs):
        if n > len(docs):
            warnings.warn(f"requested {n} documents but only {len(docs)} available", stacklevel=2)
        return list(docs)
    rng = random.Random(seed)
    picked = sorted(rng.sample(range(len(docs)), n))
    return [docs[i] for i in picked]
