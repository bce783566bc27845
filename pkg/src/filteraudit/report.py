"""Audit report assembly and rendering (canonical JSON, CSV bundle, markdown).

JSON is the canonical form: sorted keys, floats at 17 significant digits so
parse-back reproduces the in-memory report exactly. CSV and markdown apply
display rounding; the raw ratios live only in the JSON.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .audit import (
    GroupCounts,
    GroupRemoval,
    OccupationShift,
    OverlapMatrix,
    RemovalStats,
    RetentionStats,
    round_half_even,
)
from .kb import ALL_GROUPS, REPORT_GROUPS, DemographicGroup
from .strategies.base import StrategyCategory, StrategyId

FORMATS = ("json", "csv-bundle", "markdown")

#: display decimals for percentages in csv/markdown tables
DISPLAY_DECIMALS = 2


@dataclass
class AuditReport:
    """Everything the audit produces, plus the metadata needed to re-run it."""

    metadata: dict[str, Any]
    samples: list[GroupCounts]
    baseline_mean: dict[DemographicGroup, float]
    anova_omnibus: tuple[float, float] | None
    anova_pairwise: dict[tuple[str, str], tuple[float, float]]
    removal: list[RemovalStats]
    overlap: OverlapMatrix
    retention: list[RetentionStats]
    top_terms: dict[str, list[tuple[str, int]]]
    occupations: OccupationShift
    coverage: dict[str, Any] = field(default_factory=dict)


# --- canonical JSON ---------------------------------------------------------


def _canon(value: Any, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format(value, ".17g"))
    elif isinstance(value, str):
        out.append('"' + value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t") + '"')
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(",")
            _canon(item, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(",")
            if not isinstance(key, str):
                raise TypeError(f"non-string dict key: {key!r}")
            _canon(key, out)
            out.append(":")
            _canon(value[key], out)
        out.append("}")
    else:
        raise TypeError(f"cannot canonicalize {type(value).__name__}")


def canonical_json(value: Any) -> str:
    out: list[str] = []
    _canon(value, out)
    return "".join(out)


# --- dict conversion --------------------------------------------------------


def _strategy_dict(strategy: StrategyId) -> dict[str, str]:
    return {"name": strategy.name, "category": strategy.category.value}


def _strategy_from(obj: dict[str, str]) -> StrategyId:
    return StrategyId(StrategyCategory(obj["category"]), obj["name"])


def report_to_dict(report: AuditReport) -> dict[str, Any]:
    return {
        "metadata": report.metadata,
        "samples": [
            {"sample_id": s.sample_id, "counts": {g.value: s.counts.get(g, 0) for g in ALL_GROUPS}}
            for s in report.samples
        ],
        "baseline_mean": {g.value: report.baseline_mean.get(g, 0.0) for g in ALL_GROUPS},
        "anova": {
            "omnibus": (
                None
                if report.anova_omnibus is None
                else {"f": report.anova_omnibus[0], "p": report.anova_omnibus[1]}
            ),
            "pairwise": {
                f"{a}|{b}": {"f": fp[0], "p": fp[1]}
                for (a, b), fp in sorted(report.anova_pairwise.items())
            },
        },
        "removal": [
            {
                "strategy": _strategy_dict(r.strategy),
                "groups": {
                    g.value: {
                        "baseline": gr.baseline,
                        "removed": gr.removed,
                        "percentage": gr.percentage,
                    }
                    for g, gr in sorted(r.groups.items(), key=lambda kv: kv[0].value)
                },
            }
            for r in report.removal
        ],
        "overlap": {
            "sizes": dict(report.overlap.sizes),
            "pairwise": {f"{a}|{b}": n for (a, b), n in sorted(report.overlap.pairwise.items())},
            "containment": {
                f"{a}|{b}": c for (a, b), c in sorted(report.overlap.containment.items())
            },
            "full_intersection": report.overlap.full_intersection,
        },
        "retention": [
            {
                "strategy": _strategy_dict(r.strategy),
                "kept_fraction": r.kept_fraction,
                "kept_toxic_fraction": r.kept_toxic_fraction,
            }
            for r in report.retention
        ],
        "top_terms": {
            name: [{"term": t, "count": c} for t, c in terms]
            for name, terms in sorted(report.top_terms.items())
        },
        "occupations": {
            "k": report.occupations.k,
            "baseline": {
                g.value: [{"occupation": o, "count": c} for o, c in report.occupations.baseline_top.get(g, [])]
                for g in ALL_GROUPS
            },
            "filtered": {
                g.value: [{"occupation": o, "count": c} for o, c in report.occupations.filtered_top.get(g, [])]
                for g in ALL_GROUPS
            },
        },
        "coverage": report.coverage,
    }


def report_from_dict(obj: dict[str, Any]) -> AuditReport:
    groups_by_value = {g.value: g for g in ALL_GROUPS}

    def pairs(items):
        return [(item["term"], item["count"]) for item in items]

    def occ_pairs(items):
        return [(item["occupation"], item["count"]) for item in items]

    omnibus = obj["anova"]["omnibus"]
    return AuditReport(
        metadata=obj["metadata"],
        samples=[
            GroupCounts(
                sample_id=s["sample_id"],
                counts={groups_by_value[k]: v for k, v in s["counts"].items()},
            )
            for s in obj["samples"]
        ],
        baseline_mean={groups_by_value[k]: v for k, v in obj["baseline_mean"].items()},
        anova_omnibus=None if omnibus is None else (omnibus["f"], omnibus["p"]),
        anova_pairwise={
            tuple(key.split("|", 1)): (fp["f"], fp["p"])
            for key, fp in obj["anova"]["pairwise"].items()
        },
        removal=[
            RemovalStats(
                strategy=_strategy_from(r["strategy"]),
                groups={
                    groups_by_value[k]: GroupRemoval(baseline=v["baseline"], removed=v["removed"])
                    for k, v in r["groups"].items()
                },
            )
            for r in obj["removal"]
        ],
        overlap=OverlapMatrix(
            sizes=dict(obj["overlap"]["sizes"]),
            pairwise={tuple(k.split("|", 1)): v for k, v in obj["overlap"]["pairwise"].items()},
            containment={
                tuple(k.split("|", 1)): v for k, v in obj["overlap"]["containment"].items()
            },
            full_intersection=obj["overlap"]["full_intersection"],
        ),
        retention=[
            RetentionStats(
                strategy=_strategy_from(r["strategy"]),
                kept_fraction=r["kept_fraction"],
                kept_toxic_fraction=r["kept_toxic_fraction"],
            )
            for r in obj["retention"]
        ],
        top_terms={name: pairs(terms) for name, terms in obj["top_terms"].items()},
        occupations=OccupationShift(
            baseline_top={
                groups_by_value[k]: occ_pairs(v) for k, v in obj["occupations"]["baseline"].items()
            },
            filtered_top={
                groups_by_value[k]: occ_pairs(v) for k, v in obj["occupations"]["filtered"].items()
            },
            k=obj["occupations"]["k"],
        ),
        coverage=obj["coverage"],
    )


# --- renderers --------------------------------------------------------------


def _fmt_pct(value: float | None) -> str:
    if value is None:
        return "N/A"
    return f"{round_half_even(value, DISPLAY_DECIMALS)}%"


def _csv_text(rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _group_headers() -> list[str]:
    return [g.abbrev for g in REPORT_GROUPS]


def _csv_tables(report: AuditReport) -> dict[str, str]:
    tables: dict[str, str] = {}

    rows: list[list[Any]] = [["sample_id", *_group_headers(), "unknown"]]
    for sample in report.samples:
        rows.append(
            [sample.sample_id]
            + [sample.counts.get(g, 0) for g in REPORT_GROUPS]
            + [sample.counts.get(DemographicGroup.UNKNOWN, 0)]
        )
    rows.append(["mean"] + [report.baseline_mean.get(g, 0.0) for g in REPORT_GROUPS] + [report.baseline_mean.get(DemographicGroup.UNKNOWN, 0.0)])
    tables["baseline.csv"] = _csv_text(rows)

    rows = [["category", "strategy", *_group_headers()]]
    for removal in report.removal:
        rows.append(
            [removal.strategy.category.value, removal.strategy.name]
            + [_fmt_pct(removal.groups[g].percentage) for g in REPORT_GROUPS]
        )
    tables["removal.csv"] = _csv_text(rows)

    rows = [["strategy_a", "strategy_b", "intersection", "containment_a_in_b", "containment_b_in_a"]]
    for (a, b), inter in sorted(report.overlap.pairwise.items()):
        rows.append(
            [a, b, inter,
             round_half_even(report.overlap.containment[(a, b)], 4),
             round_half_even(report.overlap.containment[(b, a)], 4)]
        )
    rows.append(["all", "all", report.overlap.full_intersection, "", ""])
    tables["overlap.csv"] = _csv_text(rows)

    rows = [["strategy", "kept_sentences_pct", "kept_toxic_pct"]]
    for retention in report.retention:
        rows.append(
            [
                retention.strategy.name,
                round_half_even(100.0 * retention.kept_fraction, 1),
                round_half_even(100.0 * retention.kept_toxic_fraction, 1),
            ]
        )
    tables["retention.csv"] = _csv_text(rows)

    rows = [["lexicon", "rank", "term", "count"]]
    for name, terms in sorted(report.top_terms.items()):
        for rank, (term, count) in enumerate(terms, start=1):
            rows.append([name, rank, term, count])
    tables["top_terms.csv"] = _csv_text(rows)

    rows = [["group", "rank", "baseline_occupation", "baseline_count", "filtered_occupation", "filtered_count"]]
    for group in REPORT_GROUPS:
        base = report.occupations.baseline_top.get(group, [])
        filt = report.occupations.filtered_top.get(group, [])
        for rank in range(max(len(base), len(filt))):
            brow = base[rank] if rank < len(base) else ("", "")
            frow = filt[rank] if rank < len(filt) else ("", "")
            rows.append([group.abbrev, rank + 1, brow[0], brow[1], frow[0], frow[1]])
    tables["occupations.csv"] = _csv_text(rows)

    rows = [["design", "groups", "f", "p"]]
    if report.anova_omnibus is not None:
        rows.append(["omnibus", "all", report.anova_omnibus[0], report.anova_omnibus[1]])
    for (a, b), (f_value, p_value) in sorted(report.anova_pairwise.items()):
        rows.append(["pairwise", f"{a}|{b}", f_value, p_value])
    tables["anova.csv"] = _csv_text(rows)

    return tables


def _markdown(report: AuditReport) -> str:
    lines: list[str] = ["# Filtering strategy audit", ""]
    meta = report.metadata
    lines.append(f"- config hash: `{meta.get('config_hash', '?')}`")
    lines.append(f"- region map hash: `{meta.get('region_map_hash', '?')}`")
    lines.append(f"- seeds: `{meta.get('seeds', {})}`")
    lines.append("")

    lines.append("## Mentions per group")
    lines.append("")
    header = ["strategy", *_group_headers()]
    lines.append("| " + " | ".join(header) + " |")
    lines.append("|" + "---|" * len(header))
    lines.append(
        "| unfiltered | "
        + " | ".join(str(round_half_even(report.baseline_mean.get(g, 0.0), 1)) for g in REPORT_GROUPS)
        + " |"
    )
    for removal in report.removal:
        cells = [_fmt_pct(removal.groups[g].percentage) for g in REPORT_GROUPS]
        lines.append(f"| {removal.strategy.name} | " + " | ".join(cells) + " |")
    lines.append("")

    if report.anova_omnibus is not None:
        f_value, p_value = report.anova_omnibus
        lines.append(
            f"Cross-sample one-way ANOVA: F = {round_half_even(f_value, 4)}, "
            f"p = {round_half_even(p_value, 4)}."
        )
        lines.append("")

    lines.append("## Top matched terms")
    lines.append("")
    lines.append("| lexicon | top terms |")
    lines.append("|---|---|")
    for name, terms in sorted(report.top_terms.items()):
        lines.append(f"| {name} | " + ", ".join(t for t, _c in terms) + " |")
    lines.append("")

    lines.append("## Classifier overlap")
    lines.append("")
    lines.append("| pair | intersection | containment |")
    lines.append("|---|---|---|")
    for (a, b), inter in sorted(report.overlap.pairwise.items()):
        contain = report.overlap.containment[(a, b)]
        lines.append(f"| {a} ∩ {b} | {inter} | {round_half_even(100.0 * contain, 1)}% of {a} |")
    lines.append("")

    lines.append("## Quality filters vs. harmful sentences")
    lines.append("")
    lines.append("| strategy | sentences kept | harm-flagged kept |")
    lines.append("|---|---|---|")
    for retention in report.retention:
        lines.append(
            f"| {retention.strategy.name} "
            f"| {round_half_even(100.0 * retention.kept_fraction, 1)}% "
            f"| {round_half_even(100.0 * retention.kept_toxic_fraction, 1)}% |"
        )
    lines.append("")

    lines.append("## Most filtered occupations")
    lines.append("")
    lines.append("| group | top occupations | top filtered |")
    lines.append("|---|---|---|")
    for group in REPORT_GROUPS:
        base = ", ".join(o for o, _c in report.occupations.baseline_top.get(group, []))
        filt = ", ".join(o for o, _c in report.occupations.filtered_top.get(group, []))
        lines.append(f"| {group.abbrev} | {base} | {filt} |")
    lines.append("")
    return "\n".join(lines)


def render(report: AuditReport, out_dir: str | Path, formats: tuple[str, ...] = FORMATS) -> list[Path]:
    """Write the report files; returns the written paths (deterministic bytes)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for fmt in formats:
        if fmt == "json":
            path = out_dir / "report.json"
            path.write_text(canonical_json(report_to_dict(report)) + "\n", "utf-8")
            written.append(path)
        elif fmt == "csv-bundle":
            tables_dir = out_dir / "tables"
            tables_dir.mkdir(exist_ok=True)
            for name, payload in sorted(_csv_tables(report).items()):
                path = tables_dir / name
                path.write_text(payload, "utf-8")
                written.append(path)
        elif fmt == "markdown":
            path = out_dir / "report.md"
            path.write_text(_markdown(report), "utf-8")
            written.append(path)
        else:
            raise ValueError(f"unknown report format {fmt!r}")
    return written
