"""Strategy identity and verdict types shared by all filter plugins."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class StrategyCategory(Enum):
    RULE_BASED = "rule-based"
    CLASSIFIER_BASED = "classifier-based"
    QUALITY_BASED = "quality-based"


#: fixed category for each built-in strategy name
BUILTIN_STRATEGIES = {
    "shutterstock": StrategyCategory.RULE_BASED,
    "hatebase": StrategyCategory.RULE_BASED,
    "perspective": StrategyCategory.CLASSIFIER_BASED,
    "fasttext": StrategyCategory.CLASSIFIER_BASED,
    "profanity": StrategyCategory.CLASSIFIER_BASED,
    "quality_wiki": StrategyCategory.QUALITY_BASED,
    "quality_webtext": StrategyCategory.QUALITY_BASED,
}


@dataclass(frozen=True)
class StrategyId:
    """Category/name pair; built-in names carry a fixed category."""

    category: StrategyCategory
    name: str

    def __post_init__(self) -> None:
        fixed = BUILTIN_STRATEGIES.get(self.name)
        if fixed is not None and fixed is not self.category:
            raise ValueError(f"strategy {self.name!r} is {fixed.value}, not {self.category.value}")

    @property
    def sentence_level(self) -> bool:
        return self.category is not StrategyCategory.QUALITY_BASED


def builtin_strategy_id(name: str) -> StrategyId:
    try:
        return StrategyId(BUILTIN_STRATEGIES[name], name)
    except KeyError:
        raise KeyError(f"unknown built-in strategy {name!r}") from None


@dataclass(frozen=True)
class StrategyVerdict:
    """Flag for one unit: a sentence (``sentence_index`` set) or a whole
    document (``sentence_index`` None, quality strategies only)."""

    doc_id: str
    sentence_index: int | None
    flagged: bool
    score: float | None = None
    matched_terms: tuple[str, ...] = ()

    @property
    def unit(self) -> str | tuple[str, int]:
        if self.sentence_index is None:
            return self.doc_id
        return (self.doc_id, self.sentence_index)
