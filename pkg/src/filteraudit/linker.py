"""Person mention detection and resolution against the People Dataset.

The offline core replaces neural NER with gazetteer matching (precision over
recall) and replaces the online title search with the same similarity gate
applied to gazetteer candidates. Optional adapters plug in an external NER
process and a MediaWiki-search-compatible resolver; with both disabled the
pipeline is a pure function of (corpus, gazetteer, threshold).

The similarity gate itself stands in for unpublished heuristics: it is
1 - normalized Levenshtein distance over normalized strings.
"""
from __future__ import annotations

import hashlib
import json
import os
import subprocess
import threading
import time
import urllib.parse
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .kb import DemographicGroup, Gazetteer, PeopleDataset, RegionMap, classify_group
from .ingest.gate import Document, GateStatus
from .text import normalize_surface

DEFAULT_LINK_THRESHOLD = 0.85


@dataclass(frozen=True)
class MentionSpan:
    """Token range [start, end) within one sentence; surface is the covered text."""

    doc_id: str
    sentence_index: int
    start: int
    end: int
    surface: str


@dataclass(frozen=True)
class LinkedMention:
    span: MentionSpan
    entity_id: str
    group: DemographicGroup
    similarity: float


def detect_person_mentions(doc: Document, gaz: Gazetteer) -> list[MentionSpan]:
    """Longest-match, non-overlapping gazetteer hits over each sentence.

    Matches are token-boundary aligned and scanned left to right; on a tie
    the leftmost longest key wins and scanning resumes past it.
    """
    if doc.gate_status is not GateStatus.KEPT:
        raise ValueError(f"document {doc.doc_id} did not pass the gate")
    spans: list[MentionSpan] = []
    for sentence in doc.sentences:
        norms = [t.norm for t in sentence.tokens]
        i = 0
        while i < len(norms):
            hit = gaz.longest_match(norms, i)
            if hit is None:
                i += 1
                continue
            length, _key, _ids = hit
            start_tok = sentence.tokens[i]
            end_tok = sentence.tokens[i + length - 1]
            spans.append(
                MentionSpan(
                    doc_id=doc.doc_id,
                    sentence_index=sentence.index,
                    start=i,
                    end=i + length,
                    surface=sentence.text[start_tok.start : end_tok.end],
                )
            )
            i += length
    return spans


def _levenshtein(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def name_similarity(surface: str, candidate_name: str) -> float:
    """1 - normalized edit distance over normalized strings, in [0, 1]."""
    a = normalize_surface(surface)
    b = normalize_surface(candidate_name)
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - _levenshtein(a, b) / longest


def _best_candidate(
    surface: str, candidate_ids: list[str], people: PeopleDataset
) -> tuple[str, float] | None:
    best_id: str | None = None
    best_sim = -1.0
    for entity_id in sorted(candidate_ids):
        record = people.by_id.get(entity_id)
        if record is None:
            continue
        sim = max(name_similarity(surface, name) for name in record.names())
        if sim > best_sim:
            best_id, best_sim = entity_id, sim
    if best_id is None:
        return None
    return best_id, best_sim


def link_mentions(
    doc: Document,
    gaz: Gazetteer,
    people: PeopleDataset,
    region_map: RegionMap,
    threshold: float = DEFAULT_LINK_THRESHOLD,
    spans: list[MentionSpan] | None = None,
    resolver: "OnlineResolver | None" = None,
) -> list[LinkedMention]:
    """Resolve mentions to People Dataset entries.

    For each span the gazetteer supplies candidates; the best candidate by
    name similarity survives if it clears ``threshold``, ties going to the
    lexicographically smallest entity id. Spans without a surviving candidate
    are dropped (callers count them as ``len(spans) - len(linked)``). When a
    resolver is supplied it is consulted only for spans with no gazetteer
    candidates, and its answers pass the same similarity and
    membership gates.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be within [0, 1]")
    if spans is None:
        spans = detect_person_mentions(doc, gaz)
    linked: list[LinkedMention] = []
    for span in spans:
        candidates = gaz.lookup(span.surface)
        best: tuple[str, float] | None = None
        if candidates:
            best = _best_candidate(span.surface, candidates, people)
        elif resolver is not None:
            resolved = resolver.resolve(span.surface)
            if resolved is not None:
                title, entity_id = resolved
                if entity_id in people.by_id:
                    best = (entity_id, name_similarity(span.surface, title))
        if best is None:
            continue
        entity_id, sim = best
        if sim < threshold:
            continue
        record = people.by_id[entity_id]
        linked.append(
            LinkedMention(
                span=span,
                entity_id=entity_id,
                group=classify_group(record, region_map),
                similarity=sim,
            )
        )
    return linked


class NerAdapterError(RuntimeError):
    pass


class NerAdapter:
    """External NER process: sentences in on stdin (one per line), spans out
    as ``sentence_index TAB start TAB end`` token indices."""

    def __init__(self, command: list[str], timeout: float = 60.0):
        self.command = list(command)
        self.timeout = timeout
        self.invalid_spans = 0

    def spans_for_document(self, doc: Document) -> list[MentionSpan]:
        payload = "\n".join(s.text.replace("\n", " ") for s in doc.sentences) + "\n"
        try:
            proc = subprocess.run(
                self.command,
                input=payload.encode("utf-8"),
                capture_output=True,
                timeout=self.timeout,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise NerAdapterError(f"NER adapter failed: {exc}") from exc
        if proc.returncode != 0:
            raise NerAdapterError(f"NER adapter exited with {proc.returncode}")
        spans: list[MentionSpan] = []
        for line in proc.stdout.decode("utf-8", "replace").splitlines():
            line = line.strip()
            if not line:
                continue
            parts = line.split("\t")
            try:
                sidx, start, end = int(parts[0]), int(parts[1]), int(parts[2])
                sentence = doc.sentences[sidx]
                if not (0 <= start < end <= len(sentence.tokens)):
                    raise IndexError
            except (ValueError, IndexError):
                self.invalid_spans += 1
                continue
            start_tok = sentence.tokens[start]
            end_tok = sentence.tokens[end - 1]
            spans.append(
                MentionSpan(
                    doc_id=doc.doc_id,
                    sentence_index=sidx,
                    start=start,
                    end=end,
                    surface=sentence.text[start_tok.start : end_tok.end],
                )
            )
        return spans


class OnlineResolver:
    """Title search against a MediaWiki-search-compatible endpoint.

    Answers are cached on disk as tab-separated (surface, title, entity_id)
    lines, written atomically. ``fixture_dir`` replays recorded response JSON
    (keyed by the sha256 of the normalized surface) through the same parsing
    path, so tests never touch the network. Disabled or failing lookups
    return None, which callers treat as "fall back to the offline path".
    """

    def __init__(
        self,
        base_url: str | None = None,
        cache_path: str | Path | None = None,
        enabled: bool = False,
        fixture_dir: str | Path | None = None,
        min_interval_s: float = 0.2,
        timeout: float = 10.0,
    ):
        self.base_url = base_url
        self.cache_path = Path(cache_path) if cache_path else None
        self.enabled = enabled
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None
        self.min_interval_s = min_interval_s
        self.timeout = timeout
        self.network_calls = 0
        self._cache: dict[str, tuple[str, str]] = {}
        self._lock = threading.Lock()
        self._last_call = 0.0
        if self.cache_path and self.cache_path.exists():
            for line in self.cache_path.read_text("utf-8").splitlines():
                parts = line.split("\t")
                if len(parts) == 3:
                    self._cache[parts[0]] = (parts[1], parts[2])

    @staticmethod
    def _surface_key(surface: str) -> str:
        return normalize_surface(surface)

    @staticmethod
    def parse_search_response(payload: bytes | str) -> tuple[str, str] | None:
        """First hit's (title, wikibase id) from a search response document."""
        try:
            obj = json.loads(payload)
            hits = obj["query"]["search"]
            if not hits:
                return None
            first = hits[0]
            title = str(first["title"])
            entity_id = str(first["wikibase_item"])
        except (json.JSONDecodeError, KeyError, IndexError, TypeError):
            return None
        return title, entity_id

    def _write_cache(self) -> None:
        if not self.cache_path:
            return
        tmp = self.cache_path.with_suffix(self.cache_path.suffix + ".tmp")
        lines = [f"{k}\t{v[0]}\t{v[1]}" for k, v in sorted(self._cache.items())]
        tmp.write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")
        os.replace(tmp, self.cache_path)

    def _fetch(self, key: str) -> bytes | None:
        if self.fixture_dir is not None:
            digest = hashlib.sha256(key.encode("utf-8")).hexdigest()
            path = self.fixture_dir / f"{digest}.json"
            if not path.exists():
                return None
            return path.read_bytes()
        if not self.base_url:
            return None
        wait = self.min_interval_s - (time.monotonic() - self._last_call)
        if wait > 0:
            time.sleep(wait)
        url = self.base_url + "?" + urllib.parse.urlencode(
            {"action": "query", "list": "search", "srsearch": key, "format": "json"}
        )
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                body = resp.read()
        except OSError:
            return None
        finally:
            self._last_call = time.monotonic()
            self.network_calls += 1
        return body

    def resolve(self, surface: str) -> tuple[str, str] | None:
        if not self.enabled:
            return None
        key = self._surface_key(surface)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
            payload = self._fetch(key)
            if payload is None:
                return None
            parsed = self.parse_search_response(payload)
            if parsed is None:
                return None
            self._cache[key] = parsed
            self._write_cache()
            return parsed
