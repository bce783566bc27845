"""Strategy runners: one verdict stream per (strategy, document).

Rule- and classifier-based strategies emit one verdict per sentence; quality
strategies emit one document-level verdict. All runners are pure functions
of (unit text, strategy config), so re-running a corpus reproduces the exact
verdict stream.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..ingest.gate import Document
from .adapters import ToxicityAdapter
from .base import StrategyId, StrategyVerdict
from .lexicon import TokenAutomaton, lexicon_flag
from .linear import (
    DEFAULT_THRESHOLD,
    HashedLinearModel,
    predict_proba_tokens,
    quality_gate,
    threshold_flag,
)


@dataclass
class LexiconStrategy:
    strategy_id: StrategyId
    matcher: TokenAutomaton

    def verdicts(self, doc: Document) -> list[StrategyVerdict]:
        return [lexicon_flag(s, self.matcher, doc_id=doc.doc_id) for s in doc.sentences]


@dataclass
class ClassifierStrategy:
    """Thresholded probability flagging per sentence. The binary hate-speech
    style variant is the same runner with threshold 0.5."""

    strategy_id: StrategyId
    model: HashedLinearModel
    threshold: float = DEFAULT_THRESHOLD

    def verdicts(self, doc: Document) -> list[StrategyVerdict]:
        out = []
        for sentence in doc.sentences:
            p = predict_proba_tokens(self.model, [t.norm for t in sentence.tokens])
            out.append(
                StrategyVerdict(
                    doc_id=doc.doc_id,
                    sentence_index=sentence.index,
                    flagged=threshold_flag(p, self.threshold),
                    score=p,
                )
            )
        return out


@dataclass
class AdapterStrategy:
    """Sentence flagging through an external scorer; unscored sentences yield
    no verdict and are tallied on the adapter."""

    strategy_id: StrategyId
    adapter: ToxicityAdapter
    threshold: float = DEFAULT_THRESHOLD

    def verdicts(self, doc: Document) -> list[StrategyVerdict]:
        out = []
        for sentence in doc.sentences:
            p = self.adapter.score(sentence.text)
            if p is None:
                continue
            out.append(
                StrategyVerdict(
                    doc_id=doc.doc_id,
                    sentence_index=sentence.index,
                    flagged=threshold_flag(p, self.threshold),
                    score=p,
                )
            )
        return out


@dataclass
class QualityStrategy:
    strategy_id: StrategyId
    model: HashedLinearModel
    quality_threshold: float

    def verdicts(self, doc: Document) -> list[StrategyVerdict]:
        return [quality_gate(doc, self.model, self.quality_threshold)]
