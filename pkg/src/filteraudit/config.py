"""Run configuration: INI-style file, validated into a RunConfig.

Paths are resolved relative to the config file's directory, so a fixture
tree with a relative config is portable and its config hash is stable.
Seeds must be explicit (no wall-clock defaults) and secrets are only ever
named via environment variables.
"""
from __future__ import annotations

import configparser
import glob
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

from .strategies.base import BUILTIN_STRATEGIES

QUALITY_STRATEGIES = ("quality_wiki", "quality_webtext")
MODEL_STRATEGIES = ("perspective", "fasttext", "profanity") + QUALITY_STRATEGIES
LEXICON_STRATEGIES = ("shutterstock", "hatebase")

DEFAULT_REMOVAL_TARGETS = {"quality_wiki": 0.15, "quality_webtext": 0.45}


class ConfigError(ValueError):
    """Invalid run configuration (exit code 1)."""


@dataclass
class AdapterSettings:
    offline: bool = True
    perspective_mode: str = "local"  # local | external
    perspective_endpoint: str | None = None
    perspective_key_env: str | None = None
    perspective_fixtures: Path | None = None
    resolver_enabled: bool = False
    resolver_url: str | None = None
    resolver_fixtures: Path | None = None
    ner_command: list[str] = field(default_factory=list)


@dataclass
class RunConfig:
    config_path: Path
    config_hash: str
    corpus_inputs: list[Path]
    corpus_format: str
    people_path: Path
    regions_path: Path | None
    lexicon_paths: dict[str, Path | None]
    enabled: list[str]
    dim: int
    epochs: int
    lr: float
    training_corpora: dict[str, tuple[Path, Path]]
    model_paths: dict[str, Path]
    classifier_threshold: float
    fasttext_threshold: float
    link_threshold: float
    removal_targets: dict[str, float]
    sample_count: int
    sample_size: int
    sampling_seed: int
    run_seed: int
    jobs: int
    output_dir: Path
    adapters: AdapterSettings

    @property
    def enabled_model_strategies(self) -> list[str]:
        return [name for name in self.enabled if name in MODEL_STRATEGIES]

    @property
    def enabled_lexicon_strategies(self) -> list[str]:
        return [name for name in self.enabled if name in LEXICON_STRATEGIES]

    def trains_locally(self, name: str) -> bool:
        if name == "perspective" and self.adapters.perspective_mode == "external":
            return False
        return name not in self.model_paths


def _split_list(raw: str) -> list[str]:
    return [part for chunk in raw.split(",") for part in chunk.split() if part]


def _resolve(base: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else (base / p)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(raw.decode("utf-8"))
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc

    base = path.parent
    problems: list[str] = []

    def need(section: str, key: str) -> str:
        if not parser.has_option(section, key) or not parser.get(section, key).strip():
            problems.append(f"missing required key [{section}] {key}")
            return ""
        return parser.get(section, key).strip()

    def optional(section: str, key: str, default: str = "") -> str:
        if parser.has_option(section, key):
            return parser.get(section, key).strip()
        return default

    def number(section: str, key: str, default: str, cast, low=None, high=None):
        raw_value = optional(section, key, default)
        try:
            value = cast(raw_value)
        except ValueError:
            problems.append(f"[{section}] {key} is not a {cast.__name__}: {raw_value!r}")
            return cast(default)
        if low is not None and value < low or high is not None and value > high:
            problems.append(f"[{section}] {key}={value} outside [{low}, {high}]")
        return value

    corpus_inputs: list[Path] = []
    for pattern in _split_list(need("corpus", "inputs")):
        resolved = _resolve(base, pattern)
        matches = sorted(glob.glob(str(resolved)))
        if matches:
            corpus_inputs.extend(Path(m) for m in matches)
        else:
            problems.append(f"corpus input matches nothing: {pattern}")
    corpus_format = optional("corpus", "format", "warc").lower()
    if corpus_format not in ("warc", "jsonl"):
        problems.append(f"unknown corpus format {corpus_format!r}")

    people_raw = need("kb", "people")
    people_path = _resolve(base, people_raw) if people_raw else base
    regions_raw = optional("kb", "regions")
    regions_path = _resolve(base, regions_raw) if regions_raw else None

    lexicon_paths: dict[str, Path | None] = {}
    for name in LEXICON_STRATEGIES:
        value = optional("lexicons", name)
        lexicon_paths[name] = _resolve(base, value) if value else None

    enabled = _split_list(optional("strategies", "enabled", " ".join(BUILTIN_STRATEGIES)))
    for name in enabled:
        if name not in BUILTIN_STRATEGIES:
            problems.append(f"unknown strategy {name!r} in [strategies] enabled")
    if len(set(enabled)) != len(enabled):
        problems.append("[strategies] enabled lists a strategy twice")

    dim = number("training", "dim", "1000", int, low=1)
    epochs = number("training", "epochs", "10", int, low=1)
    lr = number("training", "lr", "0.5", float, low=1e-9)

    model_paths: dict[str, Path] = {}
    for name in MODEL_STRATEGIES:
        value = optional("models", name)
        if value:
            model_paths[name] = _resolve(base, value)

    adapters = AdapterSettings(
        offline=optional("adapters", "offline", "true").lower() in ("1", "true", "yes"),
        perspective_mode=optional("adapters", "perspective_mode", "local").lower(),
        perspective_endpoint=optional("adapters", "perspective_endpoint") or None,
        perspective_key_env=optional("adapters", "perspective_key_env") or None,
        perspective_fixtures=(
            _resolve(base, optional("adapters", "perspective_fixtures"))
            if optional("adapters", "perspective_fixtures")
            else None
        ),
        resolver_enabled=optional("adapters", "resolver_enabled", "false").lower() in ("1", "true", "yes"),
        resolver_url=optional("adapters", "resolver_url") or None,
        resolver_fixtures=(
            _resolve(base, optional("adapters", "resolver_fixtures"))
            if optional("adapters", "resolver_fixtures")
            else None
        ),
        ner_command=_split_list(optional("adapters", "ner_command")),
    )
    if adapters.perspective_mode not in ("local", "external"):
        problems.append("[adapters] perspective_mode must be local or external")

    training_corpora: dict[str, tuple[Path, Path]] = {}
    for name in MODEL_STRATEGIES:
        if name not in enabled or name in model_paths:
            continue
        if name == "perspective" and adapters.perspective_mode == "external":
            continue
        pos = optional("training", f"{name}_pos")
        neg = optional("training", f"{name}_neg")
        if not pos or not neg:
            problems.append(f"strategy {name} needs [training] {name}_pos/{name}_neg or a [models] entry")
            continue
        training_corpora[name] = (_resolve(base, pos), _resolve(base, neg))

    classifier_threshold = number("thresholds", "classifier", "0.8", float, 0.0, 1.0)
    fasttext_threshold = number("thresholds", "fasttext", "0.5", float, 0.0, 1.0)
    link_threshold = number("thresholds", "link", "0.85", float, 0.0, 1.0)
    removal_targets = {
        name: number(
            "thresholds", f"{name}_removal", str(DEFAULT_REMOVAL_TARGETS[name]), float, 0.0, 1.0
        )
        for name in QUALITY_STRATEGIES
    }

    sample_count = number("sampling", "count", "5", int, low=1)
    sample_size = number("sampling", "size", "100", int, low=1)
    if not parser.has_option("sampling", "seed"):
        problems.append("missing required key [sampling] seed (seeds must be explicit)")
    sampling_seed = number("sampling", "seed", "0", int)
    if not parser.has_option("run", "seed"):
        problems.append("missing required key [run] seed (seeds must be explicit)")
    run_seed = number("run", "seed", "0", int)
    jobs = number("run", "jobs", "1", int, low=1)
    output_dir = _resolve(base, optional("run", "output", "out"))

    # existence checks for every referenced path
    for label, p in [("kb people", people_path if people_raw else None), ("kb regions", regions_path)]:
        if p is not None and not p.is_file():
            problems.append(f"{label} file not found: {p}")
    for name, p in lexicon_paths.items():
        if p is not None and not p.is_file():
            problems.append(f"lexicon {name} file not found: {p}")
    for name, p in model_paths.items():
        if not p.is_file():
            problems.append(f"model file for {name} not found: {p}")
    for name, (pos, neg) in training_corpora.items():
        for p in (pos, neg):
            if not p.is_file():
                problems.append(f"training corpus for {name} not found: {p}")
    for p in corpus_inputs:
        if not p.is_file():
            problems.append(f"corpus input not found: {p}")

    if problems:
        raise ConfigError("invalid config:\n  " + "\n  ".join(problems))

    return RunConfig(
        config_path=path,
        config_hash=hashlib.sha256(raw).hexdigest(),
        corpus_inputs=corpus_inputs,
        corpus_format=corpus_format,
        people_path=people_path,
        regions_path=regions_path,
        lexicon_paths=lexicon_paths,
        enabled=enabled,
        dim=dim,
        epochs=epochs,
        lr=lr,
        training_corpora=training_corpora,
        model_paths=model_paths,
        classifier_threshold=classifier_threshold,
        fasttext_threshold=fasttext_threshold,
        link_threshold=link_threshold,
        removal_targets=removal_targets,
        sample_count=sample_count,
        sample_size=sample_size,
        sampling_seed=sampling_seed,
        run_seed=run_seed,
        jobs=jobs,
        output_dir=output_dir,
        adapters=adapters,
    )
