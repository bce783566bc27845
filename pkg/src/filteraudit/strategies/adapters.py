"""External toxicity-scoring adapter (commentAnalyzer-compatible wire format).

Request body: ``{"comment": {"text": ...}, "requestedAttributes":
{"TOXICITY": {}}, "languages": ["en"]}``; the score is read from
``attributeScores.TOXICITY.summaryScore.value``. In offline mode recorded
response JSON files are replayed through the same parsing path, keyed by the
sha256 of the text. Scores are cached by text hash; units the provider never
scores come back as None and are excluded from that strategy's statistics
(the pipeline counts them).
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
import urllib.request
from pathlib import Path


class ToxicityAdapter:
    def __init__(
        self,
        endpoint: str | None = None,
        api_key_env: str | None = None,
        offline: bool = True,
        fixture_dir: str | Path | None = None,
        cache_path: str | Path | None = None,
        max_retries: int = 3,
        backoff_s: float = 0.5,
        timeout: float = 10.0,
    ):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.offline = offline
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None
        self.cache_path = Path(cache_path) if cache_path else None
        self.max_retries = max_retries
        self.backoff_s = backoff_s
        self.timeout = timeout
        self.network_calls = 0
        self.unscored = 0
        self._lock = threading.Lock()
        self._cache: dict[str, float] = {}
        if self.cache_path and self.cache_path.exists():
            for line in self.cache_path.read_text("utf-8").splitlines():
                try:
                    obj = json.loads(line)
                    self._cache[obj["hash"]] = float(obj["score"])
                except (json.JSONDecodeError, KeyError, ValueError, TypeError):
                    continue

    @staticmethod
    def text_hash(text: str) -> str:
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    @staticmethod
    def parse_response(payload: bytes | str) -> float | None:
        try:
            obj = json.loads(payload)
            value = float(obj["attributeScores"]["TOXICITY"]["summaryScore"]["value"])
        except (json.JSONDecodeError, KeyError, ValueError, TypeError):
            return None
        return min(max(value, 0.0), 1.0)

    def _append_cache(self, digest: str, score: float) -> None:
        if not self.cache_path:
            return
        tmp = self.cache_path.with_suffix(self.cache_path.suffix + ".tmp")
        lines = [json.dumps({"hash": h, "score": s}, sort_keys=True) for h, s in sorted(self._cache.items())]
        tmp.write_text("\n".join(lines) + "\n", "utf-8")
        os.replace(tmp, self.cache_path)

    def _fetch(self, text: str, digest: str) -> bytes | None:
        if self.offline or self.fixture_dir is not None:
            if self.fixture_dir is None:
                return None
            path = self.fixture_dir / f"{digest}.json"
            return path.read_bytes() if path.exists() else None
        if not self.endpoint:
            return None
        key = os.environ.get(self.api_key_env, "") if self.api_key_env else ""
        url = self.endpoint + (f"?key={key}" if key else "")
        body = json.dumps(
            {"comment": {"text": text}, "requestedAttributes": {"TOXICITY": {}}, "languages": ["en"]}
        ).encode("utf-8")
        request = urllib.request.Request(url, data=body, headers={"Content-Type": "application/json"})
        for attempt in range(self.max_retries):
            try:
                with urllib.request.urlopen(request, timeout=self.timeout) as resp:
                    self.network_calls += 1
                    return resp.read()
            except OSError:
                self.network_calls += 1
                if attempt + 1 < self.max_retries:
                    time.sleep(self.backoff_s * (2**attempt))
        return None

    def score(self, text: str) -> float | None:
        """Provider toxicity score in [0, 1], or None when unscorable."""
        digest = self.text_hash(text)
        with self._lock:
            if digest in self._cache:
                return self._cache[digest]
            payload = self._fetch(text, digest)
            value = self.parse_response(payload) if payload is not None else None
            if value is None:
                self.unscored += 1
                return None
            self._cache[digest] = value
            self._append_cache(digest, value)
            return value
