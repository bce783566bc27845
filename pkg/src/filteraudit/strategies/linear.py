"""Feature-hashed logistic regression: the classifier behind the probability
and quality filters.

Features are unigram and adjacent-bigram counts hashed with FNV-1a 64 into a
fixed number of buckets (default 1000) and L2-normalized. Training is plain
seeded SGD, single-threaded so runs are reproducible bit for bit. The named
classifier strategies are functional stand-ins trained on different corpora,
not re-implementations of the original tools.
"""
from __future__ import annotations

import json
import math
import random
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..ingest.gate import Document
from ..text import tokenize
from .base import StrategyVerdict

DEFAULT_DIM = 1000
DEFAULT_THRESHOLD = 0.8

_MAGIC = b"FAHLM001"
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF
_BIGRAM_SEP = b"\x1e"

FEATURE_SPEC = "unigram+bigram/fnv1a64/l2"


class TrainingError(RuntimeError):
    pass


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def hash_features(tokens: Sequence[str], dim: int = DEFAULT_DIM) -> dict[int, float]:
    """Sparse L2-normalized count vector over unigrams and adjacent bigrams."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    counts: dict[int, float] = {}
    prev: bytes | None = None
    for token in tokens:
        data = token.encode("utf-8")
        bucket = fnv1a_64(data) % dim
        counts[bucket] = counts.get(bucket, 0.0) + 1.0
        if prev is not None:
            bucket = fnv1a_64(prev + _BIGRAM_SEP + data) % dim
            counts[bucket] = counts.get(bucket, 0.0) + 1.0
        prev = data
    norm = math.sqrt(sum(v * v for v in counts.values()))
    if norm > 0:
        counts = {k: v / norm for k, v in counts.items()}
    return counts


def text_tokens(text: str) -> list[str]:
    return [t.norm for t in tokenize(text)]


@dataclass
class HashedLinearModel:
    """Logistic model over hashed features; immutable once trained."""

    dim: int
    weights: np.ndarray
    bias: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.dim < 1 or self.weights.shape != (self.dim,):
            raise ValueError("weights must be a float64 vector of length dim")
        if not np.all(np.isfinite(self.weights)) or not math.isfinite(self.bias):
            raise ValueError("model parameters must be finite")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HashedLinearModel):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.bias == other.bias
            and np.array_equal(self.weights, other.weights)
            and self.metadata == other.metadata
        )

    def logit(self, features: Mapping[int, float]) -> float:
        z = self.bias
        for bucket, value in features.items():
            z += self.weights[bucket] * value
        return z

    def to_bytes(self) -> bytes:
        """Binary layout: magic, uint32 dim, dim little-endian float64 weights,
        float64 bias, uint32 metadata length, metadata JSON (UTF-8)."""
        meta = json.dumps(self.metadata, sort_keys=True, separators=(",", ":")).encode("utf-8")
        out = bytearray(_MAGIC)
        out += struct.pack("<I", self.dim)
        out += self.weights.astype("<f8").tobytes()
        out += struct.pack("<d", self.bias)
        out += struct.pack("<I", len(meta))
        out += meta
        return bytes(out)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "HashedLinearModel":
        if blob[: len(_MAGIC)] != _MAGIC:
            raise ValueError("not a hashed-linear model file")
        pos = len(_MAGIC)
        (dim,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        weights = np.frombuffer(blob, dtype="<f8", count=dim, offset=pos).copy()
        pos += 8 * dim
        (bias,) = struct.unpack_from("<d", blob, pos)
        pos += 8
        (meta_len,) = struct.unpack_from("<I", blob, pos)
        pos += 4
        metadata = json.loads(blob[pos : pos + meta_len].decode("utf-8"))
        return cls(dim=dim, weights=weights, bias=bias, metadata=metadata)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "HashedLinearModel":
        return cls.from_bytes(Path(path).read_bytes())


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def logistic_loss(model: HashedLinearModel, features: Mapping[int, float], label: float) -> float:
    """Cross-entropy of one example, in the overflow-safe formulation."""
    z = model.logit(features)
    return max(z, 0.0) - z * label + math.log1p(math.exp(-abs(z)))


def logistic_gradient(
    model: HashedLinearModel, features: Mapping[int, float], label: float
) -> tuple[dict[int, float], float]:
    """(d loss / d weights) as a sparse dict, plus d loss / d bias."""
    err = sigmoid(model.logit(features)) - label
    return ({bucket: err * value for bucket, value in features.items()}, err)


@dataclass
class TrainResult:
    model: HashedLinearModel
    epoch_losses: list[float]

    @property
    def final_loss(self) -> float:
        return self.epoch_losses[-1]


def train_linear(
    pos_docs: Sequence[str],
    neg_docs: Sequence[str],
    dim: int = DEFAULT_DIM,
    epochs: int = 10,
    lr: float = 0.5,
    seed: int = 0,
    positive_class: str = "high_quality",
) -> TrainResult:
    """Seeded shuffled SGD over hashed features; deterministic per seed.

    Raises TrainingError for an empty class or a non-finite epoch loss.
    """
    if not pos_docs or not neg_docs:
        raise TrainingError("both training classes must be non-empty")
    examples = [(hash_features(text_tokens(doc), dim), 1.0) for doc in pos_docs]
    examples += [(hash_features(text_tokens(doc), dim), 0.0) for doc in neg_docs]
    model = HashedLinearModel(dim=dim, weights=np.zeros(dim), bias=0.0)
    rng = random.Random(seed)
    order = list(range(len(examples)))
    losses: list[float] = []
    for epoch in range(epochs):
        rng.shuffle(order)
        for idx in order:
            features, label = examples[idx]
            err = sigmoid(model.logit(features)) - label
            step = lr * err
            for bucket, value in features.items():
                model.weights[bucket] -= step * value
            model.bias -= step
        epoch_loss = sum(logistic_loss(model, f, y) for f, y in examples) / len(examples)
        if not math.isfinite(epoch_loss):
            raise TrainingError(
                f"non-finite loss at epoch {epoch}: lr={lr}, dim={dim}, "
                f"examples={len(examples)}, |w|max={np.abs(model.weights).max()}"
            )
        losses.append(epoch_loss)
    model.metadata = {
        "feature_spec": FEATURE_SPEC,
        "epochs": epochs,
        "lr": lr,
        "seed": seed,
        "positive_class": positive_class,
        "final_loss": losses[-1],
    }
    return TrainResult(model=model, epoch_losses=losses)


def predict_proba_tokens(model: HashedLinearModel, tokens: Sequence[str]) -> float:
    return sigmoid(model.logit(hash_features(tokens, model.dim)))


def predict_proba(model: HashedLinearModel, text: str) -> float:
    """P(positive class) for a text; pure function of (model, text)."""
    return predict_proba_tokens(model, text_tokens(text))


def threshold_flag(p: float, threshold: float = DEFAULT_THRESHOLD) -> bool:
    """Boundary-inclusive probability flag: p of exactly ``threshold`` flags."""
    return p >= threshold


def document_text(doc: Document) -> str:
    return " ".join(s.text for s in doc.sentences)


def quality_gate(doc: Document, model: HashedLinearModel, quality_threshold: float) -> StrategyVerdict:
    """Document-level verdict: flagged for removal iff the quality score
    falls below the threshold."""
    p = predict_proba(model, document_text(doc))
    return StrategyVerdict(
        doc_id=doc.doc_id,
        sentence_index=None,
        flagged=p < quality_threshold,
        score=p,
    )


def calibrate_quality_threshold(scores: Sequence[float], target_removal_rate: float) -> float:
    """Quantile threshold so that roughly ``target_removal_rate`` of the
    scored slice falls below it (ties can shift the achieved rate)."""
    if not scores:
        raise ValueError("cannot calibrate on an empty slice")
    if not 0.0 <= target_removal_rate <= 1.0:
        raise ValueError("target removal rate must be within [0, 1]")
    ordered = sorted(scores)
    k = round(target_removal_rate * len(ordered))
    if k <= 0:
        return 0.0
    if k >= len(ordered):
        return math.nextafter(ordered[-1], math.inf)
    return ordered[k]
