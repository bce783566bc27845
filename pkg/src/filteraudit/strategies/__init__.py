"""Filtering strategies: lexicon, classifier, and quality plugins."""
from .adapters import ToxicityAdapter
from .base import (
    BUILTIN_STRATEGIES,
    StrategyCategory,
    StrategyId,
    StrategyVerdict,
    builtin_strategy_id,
)
from .lexicon import (
    Lexicon,
    LexiconError,
    TokenAutomaton,
    compile_lexicon,
    lexicon_flag,
    load_lexicon,
    parse_lexicon,
)
from .linear import (
    DEFAULT_DIM,
    DEFAULT_THRESHOLD,
    FEATURE_SPEC,
    HashedLinearModel,
    TrainingError,
    TrainResult,
    calibrate_quality_threshold,
    document_text,
    fnv1a_64,
    hash_features,
    logistic_gradient,
    logistic_loss,
    predict_proba,
    predict_proba_tokens,
    quality_gate,
    sigmoid,
    text_tokens,
    threshold_flag,
    train_linear,
)
from .runners import AdapterStrategy, ClassifierStrategy, LexiconStrategy, QualityStrategy

__all__ = [
    "AdapterStrategy",
    "BUILTIN_STRATEGIES",
    "ClassifierStrategy",
    "DEFAULT_DIM",
    "DEFAULT_THRESHOLD",
    "FEATURE_SPEC",
    "HashedLinearModel",
    "Lexicon",
    "LexiconError",
    "LexiconStrategy",
    "QualityStrategy",
    "StrategyCategory",
    "StrategyId",
    "StrategyVerdict",
    "TokenAutomaton",
    "ToxicityAdapter",
    "TrainResult",
    "TrainingError",
    "builtin_strategy_id",
    "calibrate_quality_threshold",
    "compile_lexicon",
    "document_text",
    "fnv1a_64",
    "hash_features",
    "lexicon_flag",
    "load_lexicon",
    "logistic_gradient",
    "logistic_loss",
    "parse_lexicon",
    "predict_proba",
    "predict_proba_tokens",
    "quality_gate",
    "sigmoid",
    "text_tokens",
    "threshold_flag",
    "train_linear",
]
