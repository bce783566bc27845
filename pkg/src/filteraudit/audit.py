"""Audit statistics: per-group removal, ANOVA, overlap, retention, top terms,
occupation shifts.

Counting is mention-level: every occurrence of a linked person counts once,
and a mention is "removed" by a strategy when its containing unit (sentence
for rule/classifier strategies, whole document for quality strategies) is
flagged. Removal percentages are reported negatively. All aggregations here
are pure functions over immutable verdict streams.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .kb import ALL_GROUPS, DemographicGroup, PersonRecord
from .linker import LinkedMention
from .strategies.base import StrategyId, StrategyVerdict


@dataclass
class GroupCounts:
    """Mention counts per demographic group for one sample."""

    sample_id: str
    counts: dict[DemographicGroup, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class GroupRemoval:
    baseline: int
    removed: int

    def __post_init__(self) -> None:
        if not 0 <= self.removed <= self.baseline:
            raise ValueError(f"removed={self.removed} outside [0, baseline={self.baseline}]")

    @property
    def percentage(self) -> float | None:
        """Raw removal percentage, negative by convention; None for baseline 0."""
        if self.baseline == 0:
            return None
        return -100.0 * self.removed / self.baseline


@dataclass
class RemovalStats:
    strategy: StrategyId
    groups: dict[DemographicGroup, GroupRemoval]


@dataclass
class OverlapMatrix:
    """Pairwise/triple intersections of per-strategy flagged-unit sets.

    ``containment[(a, b)]`` is |A∩B| / |A| (1.0 for empty A: the empty set is
    contained in everything).
    """

    sizes: dict[str, int]
    pairwise: dict[tuple[str, str], int]
    containment: dict[tuple[str, str], float]
    full_intersection: int


@dataclass
class RetentionStats:
    strategy: StrategyId
    kept_fraction: float
    kept_toxic_fraction: float

    def __post_init__(self) -> None:
        for value in (self.kept_fraction, self.kept_toxic_fraction):
            if not 0.0 <= value <= 1.0:
                raise ValueError("retention fractions must be within [0, 1]")


@dataclass
class OccupationShift:
    """Per group: top-k occupations over all mentions vs. mentions in flagged units."""

    baseline_top: dict[DemographicGroup, list[tuple[str, int]]]
    filtered_top: dict[DemographicGroup, list[tuple[str, int]]]
    k: int = 5


def round_half_even(value: float, decimals: int) -> float:
    """Display rounding for reports; raw ratios are stored unrounded."""
    quantum = Decimal(1).scaleb(-decimals)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_EVEN))


def baseline_counts(linked: Iterable[LinkedMention], sample_id: str = "") -> GroupCounts:
    counts = {group: 0 for group in ALL_GROUPS}
    for mention in linked:
        counts[mention.group] += 1
    return GroupCounts(sample_id=sample_id, counts=counts)


def flagged_units(verdicts: Iterable[StrategyVerdict]) -> tuple[set[tuple[str, int]], set[str]]:
    """Split one strategy's flags into sentence-level and document-level sets."""
    sentence_flags: set[tuple[str, int]] = set()
    doc_flags: set[str] = set()
    for verdict in verdicts:
        if not verdict.flagged:
            continue
        if verdict.sentence_index is None:
            doc_flags.add(verdict.doc_id)
        else:
            sentence_flags.add((verdict.doc_id, verdict.sentence_index))
    return sentence_flags, doc_flags


def mention_removed(
    mention: LinkedMention,
    sentence_flags: set[tuple[str, int]],
    doc_flags: set[str],
) -> bool:
    return (
        mention.span.doc_id in doc_flags
        or (mention.span.doc_id, mention.span.sentence_index) in sentence_flags
    )


def removed_mentions(
    linked: Iterable[LinkedMention], verdicts: Iterable[StrategyVerdict]
) -> dict[DemographicGroup, int]:
    """Per-group count of mentions whose containing unit one strategy flagged."""
    sentence_flags, doc_flags = flagged_units(verdicts)
    removed = {group: 0 for group in ALL_GROUPS}
    for mention in linked:
        if mention_removed(mention, sentence_flags, doc_flags):
            removed[mention.group] += 1
    return removed


def removal_percentages(
    strategy: StrategyId,
    baseline: GroupCounts,
    removed: Mapping[DemographicGroup, int],
) -> RemovalStats:
    groups = {
        group: GroupRemoval(baseline=baseline.counts.get(group, 0), removed=removed.get(group, 0))
        for group in ALL_GROUPS
    }
    return RemovalStats(strategy=strategy, groups=groups)


# --- one-way ANOVA ---------------------------------------------------------

_BETACF_MAX_ITER = 300
_BETACF_EPS = 1e-12
_BETACF_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_FPMIN:
        d = _BETACF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            return h
    raise RuntimeError(f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), converging to absolute tolerance well below 1e-10."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f_value: float, df_between: float, df_within: float) -> float:
    """Survival function of the F distribution via the incomplete beta."""
    if f_value <= 0.0:
        return 1.0
    if math.isinf(f_value):
        return 0.0
    x = df_within / (df_within + df_between * f_value)
    return regularized_incomplete_beta(df_within / 2.0, df_between / 2.0, x)


def anova_f(samples: Sequence[Sequence[float]]) -> tuple[float, float]:
    """One-way ANOVA F statistic and p-value across k groups of observations.

    Degenerate conventions: all values identical everywhere yields (0.0, 1.0);
    zero within-group variance with distinct means yields (inf, 0.0).
    """
    if len(samples) < 2:
        raise ValueError("ANOVA needs at least 2 groups")
    groups = [list(map(float, group)) for group in samples]
    if any(len(group) < 2 for group in groups):
        raise ValueError("each group needs at least 2 observations")
    n_total = sum(len(group) for group in groups)
    grand_mean = sum(sum(group) for group in groups) / n_total
    ss_between = sum(len(group) * (sum(group) / len(group) - grand_mean) ** 2 for group in groups)
    ss_within = sum(
        sum((value - sum(group) / len(group)) ** 2 for value in group) for group in groups
    )
    df_between = len(groups) - 1
    df_within = n_total - len(groups)
    if ss_within == 0.0:
        if ss_between == 0.0:
            return (0.0, 1.0)
        return (math.inf, 0.0)
    f_value = (ss_between / df_between) / (ss_within / df_within)
    return (f_value, f_sf(f_value, df_between, df_within))


def anova_pairwise(samples: Sequence[Sequence[float]]) -> dict[tuple[int, int], tuple[float, float]]:
    """ANOVA over every pair of groups (the omnibus design is ambiguous in
    multi-sample audits, so both are reported)."""
    return {
        (i, j): anova_f([samples[i], samples[j]])
        for i, j in combinations(range(len(samples)), 2)
    }


# --- overlap / retention / rankings ---------------------------------------


def overlap_matrix(flagged_sets: Mapping[str, set]) -> OverlapMatrix:
    names = sorted(flagged_sets)
    sizes = {name: len(flagged_sets[name]) for name in names}
    pairwise: dict[tuple[str, str], int] = {}
    containment: dict[tuple[str, str], float] = {}
    for a, b in combinations(names, 2):
        inter = len(flagged_sets[a] & flagged_sets[b])
        pairwise[(a, b)] = inter
        containment[(a, b)] = inter / sizes[a] if sizes[a] else 1.0
        containment[(b, a)] = inter / sizes[b] if sizes[b] else 1.0
    if names:
        full = set(flagged_sets[names[0]])
        for name in names[1:]:
            full &= flagged_sets[name]
        full_count = len(full)
    else:
        full_count = 0
    return OverlapMatrix(
        sizes=sizes, pairwise=pairwise, containment=containment, full_intersection=full_count
    )


def retention_of_harm(
    strategy: StrategyId,
    quality_verdicts: Iterable[StrategyVerdict],
    harm_flagged_sentences: set[tuple[str, int]],
    sentences_per_doc: Mapping[str, int],
) -> RetentionStats:
    """How much a quality filter keeps overall vs. among harm-flagged sentences.

    ``harm_flagged_sentences`` is the union of sentence flags from the
    rule/classifier strategies (configurable to a single strategy upstream).
    Empty denominators count as fully kept.
    """
    _sentence_flags, removed_docs = flagged_units(quality_verdicts)
    total = sum(sentences_per_doc.values())
    kept = sum(count for doc_id, count in sentences_per_doc.items() if doc_id not in removed_docs)
    kept_toxic = sum(1 for doc_id, _idx in harm_flagged_sentences if doc_id not in removed_docs)
    return RetentionStats(
        strategy=strategy,
        kept_fraction=kept / total if total else 1.0,
        kept_toxic_fraction=kept_toxic / len(harm_flagged_sentences) if harm_flagged_sentences else 1.0,
    )


def top_matched_terms(verdicts: Iterable[StrategyVerdict], k: int = 5) -> list[tuple[str, int]]:
    """Most frequent matched lexicon terms, count desc then term asc."""
    counts: dict[str, int] = {}
    for verdict in verdicts:
        for term in verdict.matched_terms:
            counts[term] = counts.get(term, 0) + 1
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]


def _top_k(counts: Mapping[str, int], k: int) -> list[tuple[str, int]]:
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]


def occupation_shift(
    linked: Iterable[LinkedMention],
    verdicts: Iterable[StrategyVerdict],
    records_by_id: Mapping[str, PersonRecord],
    k: int = 5,
) -> OccupationShift:
    """Occupation frequency ranking per group, over all mentions and over
    mentions in flagged units; a multi-occupation mention counts once per
    occupation."""
    sentence_flags, doc_flags = flagged_units(verdicts)
    baseline: dict[DemographicGroup, dict[str, int]] = {g: {} for g in ALL_GROUPS}
    filtered: dict[DemographicGroup, dict[str, int]] = {g: {} for g in ALL_GROUPS}
    for mention in linked:
        record = records_by_id.get(mention.entity_id)
        if record is None:
            continue
        removed = mention_removed(mention, sentence_flags, doc_flags)
        for occupation in record.occupations:
            bucket = baseline[mention.group]
            bucket[occupation] = bucket.get(occupation, 0) + 1
            if removed:
                bucket = filtered[mention.group]
                bucket[occupation] = bucket.get(occupation, 0) + 1
    return OccupationShift(
        baseline_top={g: _top_k(counts, k) for g, counts in baseline.items()},
        filtered_top={g: _top_k(counts, k) for g, counts in filtered.items()},
        k=k,
    )
