"""Pipeline stages and shard serialization.

Each stage writes its outputs under a temp directory that mirrors the run
output root; the CLI moves them into place on success (or quarantines them on
failure) and records a manifest. Stage functions are deterministic for a
fixed config, and within-stage parallelism (``jobs``) never changes outputs:
work is mapped in input order and reduced in doc-id order.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

from . import __version__
from .audit import (
    GroupCounts,
    anova_f,
    anova_pairwise,
    baseline_counts,
    flagged_units,
    occupation_shift,
    overlap_matrix,
    removal_percentages,
    removed_mentions,
    retention_of_harm,
    top_matched_terms,
)
from .config import RunConfig
from .ingest.gate import Document, GateStatus, document_gate, sample_corpus
from .ingest.sentences import Sentence
from .ingest.warc import JsonlStats, RawDocument, WarcReader, read_jsonl_corpus
from .kb import (
    DemographicGroup,
    PeopleDataset,
    RegionMap,
    build_gazetteer,
    default_region_map,
    format_person_record,
    kb_stats,
    load_people_dataset,
    load_region_map,
    parse_person_records,
)
from .linker import (
    LinkedMention,
    MentionSpan,
    NerAdapter,
    OnlineResolver,
    detect_person_mentions,
    link_mentions,
)
from .report import AuditReport, render
from .strategies.adapters import ToxicityAdapter
from .strategies.base import StrategyCategory, StrategyVerdict, builtin_strategy_id
from .strategies.lexicon import compile_lexicon, load_lexicon, parse_lexicon
from .strategies.linear import (
    HashedLinearModel,
    calibrate_quality_threshold,
    document_text,
    predict_proba,
    train_linear,
)
from .strategies.runners import (
    AdapterStrategy,
    ClassifierStrategy,
    LexiconStrategy,
    QualityStrategy,
)
from .text import Token

T = TypeVar("T")
U = TypeVar("U")

STAGES = ("build-kb", "ingest", "train", "link", "filter", "audit")


def pmap(fn: Callable[[T], U], items: Sequence[T], jobs: int) -> list[U]:
    """Order-preserving parallel map; jobs must never affect the result."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(fn, items))


def dump_json(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", "utf-8")


# --- shard serialization ----------------------------------------------------


def document_to_obj(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "url": doc.url,
        "lang": doc.lang,
        "gate_status": doc.gate_status.value,
        "sentences": [
            {
                "index": s.index,
                "start": s.start,
                "end": s.end,
                "text": s.text,
                "tokens": [[t.start, t.end, t.norm] for t in s.tokens],
            }
            for s in doc.sentences
        ],
    }


def document_from_obj(obj: dict) -> Document:
    sentences = tuple(
        Sentence(
            index=s["index"],
            start=s["start"],
            end=s["end"],
            text=s["text"],
            tokens=tuple(Token(t[0], t[1], t[2]) for t in s["tokens"]),
        )
        for s in obj["sentences"]
    )
    return Document(
        doc_id=obj["doc_id"],
        sentences=sentences,
        lang=obj["lang"],
        gate_status=GateStatus(obj["gate_status"]),
        url=obj.get("url"),
    )


def mention_to_obj(mention: LinkedMention) -> dict:
    return {
        "doc_id": mention.span.doc_id,
        "sentence": mention.span.sentence_index,
        "start": mention.span.start,
        "end": mention.span.end,
        "surface": mention.span.surface,
        "entity_id": mention.entity_id,
        "group": mention.group.value,
        "similarity": mention.similarity,
    }


def mention_from_obj(obj: dict) -> LinkedMention:
    return LinkedMention(
        span=MentionSpan(
            doc_id=obj["doc_id"],
            sentence_index=obj["sentence"],
            start=obj["start"],
            end=obj["end"],
            surface=obj["surface"],
        ),
        entity_id=obj["entity_id"],
        group=DemographicGroup(obj["group"]),
        similarity=obj["similarity"],
    )


def verdict_to_obj(verdict: StrategyVerdict) -> dict:
    return {
        "doc_id": verdict.doc_id,
        "sentence": verdict.sentence_index,
        "flagged": verdict.flagged,
        "score": verdict.score,
        "matched_terms": list(verdict.matched_terms),
    }


def verdict_from_obj(obj: dict) -> StrategyVerdict:
    return StrategyVerdict(
        doc_id=obj["doc_id"],
        sentence_index=obj["sentence"],
        flagged=obj["flagged"],
        score=obj["score"],
        matched_terms=tuple(obj["matched_terms"]),
    )


def write_jsonl(objs: Iterable[dict], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objs:
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def read_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in path.read_text("utf-8").splitlines() if line.strip()]


# --- shared loaders ---------------------------------------------------------


def region_map_for(cfg: RunConfig) -> RegionMap:
    if cfg.regions_path is not None:
        return load_region_map(cfg.regions_path)
    return default_region_map()


def lexicon_for(cfg: RunConfig, name: str):
    path = cfg.lexicon_paths.get(name)
    if path is not None:
        return load_lexicon(path, name)
    data = resources.files("filteraudit.data").joinpath(f"lexicon_{name}.txt").read_text("utf-8")
    return parse_lexicon(data.splitlines(), name)


def sample_paths(cfg: RunConfig, root: Path) -> list[Path]:
    return [root / "ingest" / f"sample_{i}.jsonl" for i in range(cfg.sample_count)]


def load_sample_docs(path: Path) -> list[Document]:
    return [document_from_obj(obj) for obj in read_jsonl(path)]


def unique_sample_docs(cfg: RunConfig, root: Path) -> list[Document]:
    """Union of sampled documents in doc_id order (each document once)."""
    docs: dict[str, Document] = {}
    for path in sample_paths(cfg, root):
        for doc in load_sample_docs(path):
            docs.setdefault(doc.doc_id, doc)
    return [docs[doc_id] for doc_id in sorted(docs)]


def _model_seed(cfg: RunConfig, name: str) -> int:
    # stable per-strategy training seed derived from the run seed
    return cfg.run_seed + 1000 * (sorted(cfg.enabled_model_strategies).index(name) + 1)


# --- stages -----------------------------------------------------------------


def stage_build_kb(cfg: RunConfig, root: Path, tmp: Path, jobs: int) -> None:
    people = load_people_dataset(cfg.people_path)
    region_map = region_map_for(cfg)
    counts = kb_stats(people.records, region_map)
    gazetteer = build_gazetteer(people.records)

    kb_dir = tmp / "kb"
    kb_dir.mkdir(parents=True, exist_ok=True)
    lines = sorted(format_person_record(rec) for rec in people.records)
    (kb_dir / "people_normalized.tsv").write_text("\n".join(lines) + "\n", "utf-8")
    gaz_lines = [f"{surface}\t{','.join(gazetteer.lookup(surface))}" for surface in gazetteer.surfaces()]
    (kb_dir / "gazetteer.tsv").write_text("\n".join(gaz_lines) + ("\n" if gaz_lines else ""), "utf-8")
    dump_json(
        {
            "records": len(people.records),
            "skipped_lines": people.skipped,
            "group_counts": {g.value: n for g, n in counts.items()},
            "region_map_hash": region_map.content_hash(),
            "gazetteer_surfaces": len(gazetteer),
        },
        kb_dir / "kb_stats.json",
    )


def stage_ingest(cfg: RunConfig, root: Path, tmp: Path, jobs: int) -> None:
    raws: list[RawDocument] = []
    parse_stats: dict[str, dict] = {}
    for path in cfg.corpus_inputs:
        if cfg.corpus_format == "warc":
            reader = WarcReader(path.read_bytes())
            raws.extend(reader)
            stats = reader.stats
            parse_stats[path.name] = {
                "records": stats.records,
                "documents": stats.documents,
                "skipped_types": stats.skipped_types,
                "record_errors": stats.record_errors,
                "gzip_member_errors": stats.gzip_member_errors,
            }
        else:
            stats = JsonlStats()
            with open(path, encoding="utf-8") as fh:
                raws.extend(read_jsonl_corpus(fh, stats))
            parse_stats[path.name] = {
                "lines": stats.lines,
                "documents": stats.documents,
                "line_errors": stats.line_errors,
            }

    docs = pmap(document_gate, raws, jobs)
    by_status: dict[str, int] = {}
    for doc in docs:
        by_status[doc.gate_status.value] = by_status.get(doc.gate_status.value, 0) + 1
    kept = [doc for doc in docs if doc.gate_status is GateStatus.KEPT]

    ingest_dir = tmp / "ingest"
    ingest_dir.mkdir(parents=True, exist_ok=True)
    write_jsonl(
        ({"doc_id": d.doc_id, "lang": d.lang, "gate_status": d.gate_status.value} for d in docs),
        ingest_dir / "gate_log.jsonl",
    )
    sample_provenance = {}
    for i in range(cfg.sample_count):
        seed = cfg.sampling_seed + i
        sample = sample_corpus(kept, cfg.sample_size, seed)
        write_jsonl((document_to_obj(d) for d in sample), ingest_dir / f"sample_{i}.jsonl")
        sample_provenance[f"sample_{i}"] = {"seed": seed, "doc_ids": [d.doc_id for d in sample]}
    dump_json(
        {
            "inputs": parse_stats,
            "gate_counts": by_status,
            "kept": len(kept),
            "samples": sample_provenance,
        },
        ingest_dir / "stats.json",
    )


def _read_training_corpus(path: Path) -> list[str]:
    return [line for line in path.read_text("utf-8").splitlines() if line.strip()]


def stage_train(cfg: RunConfig, root: Path, tmp: Path, jobs: int) -> None:
    models_dir = tmp / "models"
    models_dir.mkdir(parents=True, exist_ok=True)
    slice_docs = unique_sample_docs(cfg, root)
    slice_texts = [document_text(doc) for doc in slice_docs]
    training_report: dict[str, dict] = {}

    for name in cfg.enabled_model_strategies:
        if name == "perspective" and cfg.adapters.perspective_mode == "external":
            continue
        target = models_dir / f"{name}.hlm"
        if name in cfg.model_paths:
            model = HashedLinearModel.load(cfg.model_paths[name])
            model.save(target)
            training_report[name] = {"source": "pretrained", "final_loss": None, "losses": []}
        else:
            pos_path, neg_path = cfg.training_corpora[name]
            result = train_linear(
                _read_training_corpus(pos_path),
                _read_training_corpus(neg_path),
                dim=cfg.dim,
                epochs=cfg.epochs,
                lr=cfg.lr,
                seed=_model_seed(cfg, name),
                positive_class=name,
            )
            model = result.model
            model.save(target)
            training_report[name] = {
                "source": "trained",
                "final_loss": result.final_loss,
                "losses": result.epoch_losses,
            }
        if name in cfg.removal_targets:
            if not slice_texts:
                raise RuntimeError("no sampled documents available to calibrate quality thresholds")
            scores = [predict_proba(model, text) for text in slice_texts]
            threshold = calibrate_quality_threshold(scores, cfg.removal_targets[name])
            achieved = sum(1 for s in scores if s < threshold) / len(scores)
            dump_json(
                {
                    "quality_threshold": threshold,
                    "target_removal_rate": cfg.removal_targets[name],
                    "achieved_removal_rate": achieved,
                    "slice_size": len(scores),
                },
                models_dir / f"{name}.calibration.json",
            )
    dump_json(training_report, models_dir / "training_report.json")


def stage_link(cfg: RunConfig, root: Path, tmp: Path, jobs: int) -> None:
    people = parse_person_records(
        (root / "kb" / "people_normalized.tsv").read_text("utf-8").splitlines()
    )
    region_map = region_map_for(cfg)
    gazetteer = build_gazetteer(people.records)
    resolver = None
    if cfg.adapters.resolver_enabled and not cfg.adapters.offline:
        resolver = OnlineResolver(
            base_url=cfg.adapters.resolver_url,
            cache_path=root / "link" / "resolver_cache.tsv",
            enabled=True,
            fixture_dir=cfg.adapters.resolver_fixtures,
        )
    ner = NerAdapter(cfg.adapters.ner_command) if cfg.adapters.ner_command else None

    linked_dir = tmp / "linked"
    linked_dir.mkdir(parents=True, exist_ok=True)
    stats: dict[str, dict] = {}

    def link_doc(doc: Document) -> tuple[list[MentionSpan], list[LinkedMention]]:
        spans = ner.spans_for_document(doc) if ner else detect_person_mentions(doc, gazetteer)
        linked = link_mentions(
            doc,
            gazetteer,
            people,
            region_map,
            threshold=cfg.link_threshold,
            spans=spans,
            resolver=resolver,
        )
        return spans, linked

    for i, path in enumerate(sample_paths(cfg, root)):
        docs = load_sample_docs(path)
        results = pmap(link_doc, docs, jobs)
        mentions: list[LinkedMention] = []
        span_count = 0
        for spans, linked in results:
            span_count += len(spans)
            mentions.extend(linked)
        write_jsonl((mention_to_obj(m) for m in mentions), linked_dir / f"sample_{i}.jsonl")
        stats[f"sample_{i}"] = {
            "documents": len(docs),
            "spans": span_count,
            "linked": len(mentions),
            "unlinked": span_count - len(mentions),
            "unknown_group": sum(1 for m in mentions if m.group is DemographicGroup.UNKNOWN),
        }
    dump_json(stats, linked_dir / "stats.json")


def build_strategy_runners(cfg: RunConfig, root: Path) -> list:
    """Instantiate configured strategies against trained model artifacts."""
    runners = []
    for name in cfg.enabled:
        sid = builtin_strategy_id(name)
        if sid.category is StrategyCategory.RULE_BASED:
            runners.append(LexiconStrategy(sid, compile_lexicon(lexicon_for(cfg, name))))
        elif sid.category is StrategyCategory.CLASSIFIER_BASED:
            if name == "perspective" and cfg.adapters.perspective_mode == "external":
                adapter = ToxicityAdapter(
                    endpoint=cfg.adapters.perspective_endpoint,
                    api_key_env=cfg.adapters.perspective_key_env,
                    offline=cfg.adapters.offline,
                    fixture_dir=cfg.adapters.perspective_fixtures,
                    cache_path=root / "verdicts" / "perspective_cache.jsonl",
                )
                runners.append(AdapterStrategy(sid, adapter, cfg.classifier_threshold))
                continue
            model = HashedLinearModel.load(root / "models" / f"{name}.hlm")
            threshold = cfg.fasttext_threshold if name == "fasttext" else cfg.classifier_threshold
            runners.append(ClassifierStrategy(sid, model, threshold))
        else:
            model = HashedLinearModel.load(root / "models" / f"{name}.hlm")
            calibration = json.loads((root / "models" / f"{name}.calibration.json").read_text("utf-8"))
            runners.append(QualityStrategy(sid, model, calibration["quality_threshold"]))
    return runners


def stage_filter(cfg: RunConfig, root: Path, tmp: Path, jobs: int) -> None:
    docs = unique_sample_docs(cfg, root)
    runners = build_strategy_runners(cfg, root)
    verdicts_dir = tmp / "verdicts"
    verdicts_dir.mkdir(parents=True, exist_ok=True)
    stats: dict[str, dict] = {}
    for runner in runners:
        per_doc = pmap(runner.verdicts, docs, jobs)
        stream = [verdict for chunk in per_doc for verdict in chunk]
        write_jsonl((verdict_to_obj(v) for v in stream), verdicts_dir / f"{runner.strategy_id.name}.jsonl")
        entry = {
            "verdicts": len(stream),
            "flagged": sum(1 for v in stream if v.flagged),
        }
        if isinstance(runner, AdapterStrategy):
            entry["unscored"] = runner.adapter.unscored
        stats[runner.strategy_id.name] = entry
    dump_json(stats, verdicts_dir / "stats.json")


def stage_audit(cfg: RunConfig, root: Path, tmp: Path, jobs: int) -> None:
    report = compute_report(cfg, root)
    render(report, tmp, formats=("json", "csv-bundle", "markdown"))


def compute_report(cfg: RunConfig, root: Path) -> AuditReport:
    from .kb import ALL_GROUPS, REPORT_GROUPS

    people = parse_person_records(
        (root / "kb" / "people_normalized.tsv").read_text("utf-8").splitlines()
    )
    region_map = region_map_for(cfg)
    ingest_stats = json.loads((root / "ingest" / "stats.json").read_text("utf-8"))
    link_stats = json.loads((root / "linked" / "stats.json").read_text("utf-8"))
    filter_stats = json.loads((root / "verdicts" / "stats.json").read_text("utf-8"))

    sample_mentions: list[tuple[str, list[LinkedMention]]] = []
    for i in range(cfg.sample_count):
        mentions = [mention_from_obj(o) for o in read_jsonl(root / "linked" / f"sample_{i}.jsonl")]
        sample_mentions.append((f"sample_{i}", mentions))

    verdicts_by_strategy: dict[str, list[StrategyVerdict]] = {}
    for name in cfg.enabled:
        verdicts_by_strategy[name] = [
            verdict_from_obj(o) for o in read_jsonl(root / "verdicts" / f"{name}.jsonl")
        ]

    samples = [baseline_counts(mentions, sample_id) for sample_id, mentions in sample_mentions]
    count = len(samples) if samples else 1
    baseline_mean = {
        group: sum(s.counts.get(group, 0) for s in samples) / count for group in ALL_GROUPS
    }

    anova_values = [
        [float(s.counts.get(group, 0)) for group in REPORT_GROUPS] for s in samples
    ]
    omnibus = anova_f(anova_values) if len(anova_values) >= 2 else None
    pairwise = {}
    if len(anova_values) >= 2:
        for (i, j), fp in anova_pairwise(anova_values).items():
            pairwise[(samples[i].sample_id, samples[j].sample_id)] = fp

    removal = []
    for name in cfg.enabled:
        sid = builtin_strategy_id(name)
        verdicts = verdicts_by_strategy[name]
        total_baseline = {group: 0 for group in ALL_GROUPS}
        total_removed = {group: 0 for group in ALL_GROUPS}
        for sample_id, mentions in sample_mentions:
            base = baseline_counts(mentions, sample_id)
            removed = removed_mentions(mentions, verdicts)
            for group in ALL_GROUPS:
                total_baseline[group] += base.counts[group]
                total_removed[group] += removed[group]
        removal.append(
            removal_percentages(
                sid, GroupCounts("all_samples", total_baseline), total_removed
            )
        )

    classifier_sets = {}
    harm_sentences: set[tuple[str, int]] = set()
    for name in cfg.enabled:
        sid = builtin_strategy_id(name)
        if sid.category is StrategyCategory.QUALITY_BASED:
            continue
        sentence_flags, _doc_flags = flagged_units(verdicts_by_strategy[name])
        harm_sentences |= sentence_flags
        if sid.category is StrategyCategory.CLASSIFIER_BASED:
            classifier_sets[name] = sentence_flags
    overlap = overlap_matrix(classifier_sets)

    docs = unique_sample_docs(cfg, root)
    sentences_per_doc = {doc.doc_id: len(doc.sentences) for doc in docs}
    retention = []
    for name in cfg.enabled:
        sid = builtin_strategy_id(name)
        if sid.category is not StrategyCategory.QUALITY_BASED:
            continue
        retention.append(
            retention_of_harm(sid, verdicts_by_strategy[name], harm_sentences, sentences_per_doc)
        )

    top_terms = {
        name: top_matched_terms(verdicts_by_strategy[name])
        for name in cfg.enabled
        if builtin_strategy_id(name).category is StrategyCategory.RULE_BASED
    }

    all_mentions = [m for _sid, mentions in sample_mentions for m in mentions]
    harm_verdicts = [
        v
        for name in cfg.enabled
        if builtin_strategy_id(name).category is not StrategyCategory.QUALITY_BASED
        for v in verdicts_by_strategy[name]
    ]
    occupations = occupation_shift(all_mentions, harm_verdicts, people.by_id)

    unknown_mentions = sum(
        1 for _sid, mentions in sample_mentions for m in mentions if m.group is DemographicGroup.UNKNOWN
    )
    coverage = {
        "gate_counts": ingest_stats["gate_counts"],
        "parse_errors": ingest_stats["inputs"],
        "link": link_stats,
        "unknown_mentions": unknown_mentions,
        "unscored": {
            name: stats.get("unscored", 0)
            for name, stats in sorted(filter_stats.items())
            if "unscored" in stats
        },
    }

    metadata = {
        "tool_version": __version__,
        "config_hash": cfg.config_hash,
        "region_map_hash": region_map.content_hash(),
        "seeds": {"run": cfg.run_seed, "sampling": cfg.sampling_seed},
        "corpus": [
            {"name": p.name, "sha256": _sha256_file(p)} for p in cfg.corpus_inputs
        ],
        "strategies": list(cfg.enabled),
        "thresholds": {
            "classifier": cfg.classifier_threshold,
            "fasttext": cfg.fasttext_threshold,
            "link": cfg.link_threshold,
            "removal_targets": dict(sorted(cfg.removal_targets.items())),
        },
        "sampling": {"count": cfg.sample_count, "size": cfg.sample_size},
    }

    return AuditReport(
        metadata=metadata,
        samples=samples,
        baseline_mean=baseline_mean,
        anova_omnibus=omnibus,
        anova_pairwise=pairwise,
        removal=removal,
        overlap=overlap,
        retention=retention,
        top_terms=top_terms,
        occupations=occupations,
        coverage=coverage,
    )


def _sha256_file(path: Path) -> str:
    import hashlib

    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


STAGE_FUNCS = {
    "build-kb": stage_build_kb,
    "ingest": stage_ingest,
    "train": stage_train,
    "link": stage_link,
    "filter": stage_filter,
    "audit": stage_audit,
}


def stage_inputs(cfg: RunConfig, root: Path, stage: str) -> list[Path]:
    """Files whose content determines the stage output (for manifest hashing)."""
    if stage == "build-kb":
        paths = [cfg.people_path]
        if cfg.regions_path is not None:
            paths.append(cfg.regions_path)
        return paths
    if stage == "ingest":
        return list(cfg.corpus_inputs)
    if stage == "train":
        paths = []
        for pos, neg in sorted(cfg.training_corpora.values()):
            paths.extend([pos, neg])
        paths.extend(sorted(cfg.model_paths.values()))
        paths.extend(sample_paths(cfg, root))
        return paths
    if stage == "link":
        paths = [root / "kb" / "people_normalized.tsv"]
        if cfg.regions_path is not None:
            paths.append(cfg.regions_path)
        paths.extend(sample_paths(cfg, root))
        return paths
    if stage == "filter":
        paths = list(sample_paths(cfg, root))
        for name in cfg.enabled:
            sid = builtin_strategy_id(name)
            if sid.category is StrategyCategory.RULE_BASED:
                lex = cfg.lexicon_paths.get(name)
                if lex is not None:
                    paths.append(lex)
            elif not (name == "perspective" and cfg.adapters.perspective_mode == "external"):
                paths.append(root / "models" / f"{name}.hlm")
                if name in cfg.removal_targets:
                    paths.append(root / "models" / f"{name}.calibration.json")
        return paths
    if stage == "audit":
        paths = [
            root / "kb" / "people_normalized.tsv",
            root / "ingest" / "stats.json",
            root / "linked" / "stats.json",
            root / "verdicts" / "stats.json",
        ]
        paths.extend(sample_paths(cfg, root))
        paths.extend(root / "linked" / f"sample_{i}.jsonl" for i in range(cfg.sample_count))
        paths.extend(root / "verdicts" / f"{name}.jsonl" for name in cfg.enabled)
        return paths
    raise KeyError(stage)


def stage_params(cfg: RunConfig, stage: str) -> dict:
    """Config knobs that feed the stage, for content-addressed skipping."""
    common = {"version": __version__}
    if stage == "build-kb":
        return common | {"default_regions": cfg.regions_path is None}
    if stage == "ingest":
        return common | {
            "format": cfg.corpus_format,
            "sample_count": cfg.sample_count,
            "sample_size": cfg.sample_size,
            "sampling_seed": cfg.sampling_seed,
        }
    if stage == "train":
        return common | {
            "dim": cfg.dim,
            "epochs": cfg.epochs,
            "lr": cfg.lr,
            "run_seed": cfg.run_seed,
            "removal_targets": dict(sorted(cfg.removal_targets.items())),
            "strategies": sorted(cfg.enabled_model_strategies),
            "perspective_mode": cfg.adapters.perspective_mode,
        }
    if stage == "link":
        return common | {
            "link_threshold": cfg.link_threshold,
            "default_regions": cfg.regions_path is None,
            "ner_command": list(cfg.adapters.ner_command),
            "resolver": cfg.adapters.resolver_enabled and not cfg.adapters.offline,
        }
    if stage == "filter":
        return common | {
            "strategies": list(cfg.enabled),
            "classifier_threshold": cfg.classifier_threshold,
            "fasttext_threshold": cfg.fasttext_threshold,
            "perspective_mode": cfg.adapters.perspective_mode,
        }
    if stage == "audit":
        return common | {
            "strategies": list(cfg.enabled),
            "config_hash": cfg.config_hash,
        }
    raise KeyError(stage)
