"""WARC/WET record parsing and writing, plus JSONL corpus input.

Record grammar: version line ``WARC/1.0`` CRLF, ``Name: value`` header lines
CRLF, a blank CRLF, ``Content-Length`` payload bytes, then CRLF CRLF. Streams
may be plain concatenated records or one-gzip-member-per-record; members are
decompressed transparently. Malformed records (broken headers, wrong
Content-Length, corrupt gzip members) are skipped and counted; a stream that
does not begin with a WARC version line at all is a fatal format error.
"""
from __future__ import annotations

import hashlib
import json
import uuid
import zlib
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import BinaryIO, Iterable, Iterator

CRLF = b"\r\n"
_GZIP_MAGIC = b"\x1f\x8b"
_VERSION_PREFIX = b"WARC/"

#: record types that yield documents; warcinfo/request/metadata are skipped
_DOCUMENT_TYPES = ("response", "conversion")


class WarcFormatError(ValueError):
    """Stream is not a WARC stream at all (fatal, not a per-record error)."""


@dataclass
class RawDocument:
    doc_id: str
    url: str | None
    body: str


@dataclass
class WarcStats:
    records: int = 0
    documents: int = 0
    skipped_types: int = 0
    record_errors: int = 0
    gzip_member_errors: int = 0

    @property
    def total_errors(self) -> int:
        return self.record_errors + self.gzip_member_errors


class _HtmlTextExtractor(HTMLParser):
    """Tag stripper: script/style subtrees removed, tags become whitespace."""

    _SKIP = {"script", "style"}

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.parts: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1
        self.parts.append(" ")

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth > 0:
            self._skip_depth -= 1
        self.parts.append(" ")

    def handle_data(self, data):
        if self._skip_depth == 0:
            self.parts.append(data)


def strip_html(markup: str) -> str:
    parser = _HtmlTextExtractor()
    parser.feed(markup)
    parser.close()
    return " ".join("".join(parser.parts).split())


def _looks_like_html(payload: bytes) -> bool:
    head = payload.lstrip()[:256].lower()
    return head.startswith(b"<!doctype") or head.startswith(b"<html") or head.startswith(b"<head") or head.startswith(b"<body")


class WarcReader:
    """Iterates RawDocuments out of a WARC/WET byte stream; counts problems.

    The stream is materialized in memory: this harness targets desk-scale
    samples, and whole-buffer access keeps gzip-member resync simple.
    """

    def __init__(self, data: bytes | BinaryIO):
        raw = data if isinstance(data, (bytes, bytearray)) else data.read()
        self.stats = WarcStats()
        raw = bytes(raw)
        if raw[:2] == _GZIP_MAGIC:
            raw = self._decompress_members(raw)
        if raw and not raw.lstrip(b"\r\n").startswith(_VERSION_PREFIX):
            raise WarcFormatError("stream does not start with a WARC version line")
        self._data = raw

    def _decompress_members(self, raw: bytes) -> bytes:
        out = bytearray()
        pos = 0
        n = len(raw)
        while pos < n:
            decomp = zlib.decompressobj(wbits=31)
            try:
                chunk = decomp.decompress(raw[pos:])
                if not decomp.eof:
                    raise zlib.error("truncated gzip member")
            except zlib.error:
                self.stats.gzip_member_errors += 1
                nxt = raw.find(_GZIP_MAGIC + b"\x08", pos + 1)
                if nxt == -1:
                    break
                pos = nxt
                continue
            out += chunk
            consumed = n - pos - len(decomp.unused_data)
            pos += max(consumed, 1)
        return bytes(out)

    def _resync(self, pos: int) -> int:
        idx = self._data.find(CRLF + _VERSION_PREFIX, pos)
        if idx == -1:
            return len(self._data)
        return idx + 2

    def __iter__(self) -> Iterator[RawDocument]:
        data = self._data
        n = len(data)
        pos = 0
        while pos < n:
            while pos < n and data[pos : pos + 2] == CRLF:
                pos += 2
            if pos >= n:
                break
            if not data.startswith(_VERSION_PREFIX, pos):
                self.stats.record_errors += 1
                pos = self._resync(pos)
                continue
            record_offset = pos
            eol = data.find(CRLF, pos)
            if eol == -1:
                self.stats.record_errors += 1
                break
            pos = eol + 2
            headers: dict[str, str] = {}
            header_error = False
            while True:
                eol = data.find(CRLF, pos)
                if eol == -1:
                    header_error = True
                    pos = n
                    break
                line = data[pos:eol]
                if line == b"":
                    pos = eol + 2
                    break
                if line.startswith(_VERSION_PREFIX) or b":" not in line:
                    # ran into the next record or into payload bytes: the
                    # header block never terminated with a blank line
                    header_error = True
                    break
                name, _, value = line.partition(b":")
                headers[name.decode("utf-8", "replace").strip().lower()] = value.decode("utf-8", "replace").strip()
                pos = eol + 2
            if header_error:
                self.stats.record_errors += 1
                pos = self._resync(pos)
                continue
            try:
                length = int(headers["content-length"])
                if length < 0:
                    raise ValueError
            except (KeyError, ValueError):
                self.stats.record_errors += 1
                pos = self._resync(pos)
                continue
            payload_end = pos + length
            if payload_end + 4 > n or data[payload_end : payload_end + 4] != CRLF + CRLF:
                # declared length does not land on a record boundary
                self.stats.record_errors += 1
                pos = self._resync(pos)
                continue
            payload = data[pos:payload_end]
            pos = payload_end + 4
            self.stats.records += 1
            wtype = headers.get("warc-type", "").lower()
            if wtype not in _DOCUMENT_TYPES:
                self.stats.skipped_types += 1
                continue
            self.stats.documents += 1
            yield self._to_document(headers, payload, wtype, record_offset)

    def _to_document(self, headers: dict[str, str], payload: bytes, wtype: str, offset: int) -> RawDocument:
        doc_id = headers.get("warc-record-id", "").strip("<>")
        if not doc_id:
            doc_id = "sha256:" + hashlib.sha256(payload + str(offset).encode()).hexdigest()
        url = headers.get("warc-target-uri") or None
        body_bytes = payload
        is_html = False
        if wtype == "response":
            if body_bytes.startswith(b"HTTP/"):
                head, sep, rest = body_bytes.partition(CRLF + CRLF)
                if sep:
                    body_bytes = rest
                    is_html = b"text/html" in head.lower()
            is_html = is_html or _looks_like_html(body_bytes)
        text = body_bytes.decode("utf-8", "replace")
        if is_html:
            text = strip_html(text)
        return RawDocument(doc_id=doc_id, url=url, body=text)


def parse_warc(data: bytes | BinaryIO) -> WarcReader:
    """Reader over the stream; iterate it for RawDocuments, read ``.stats`` after."""
    return WarcReader(data)


@dataclass
class WarcRecord:
    """Writer-side record description."""

    record_type: str
    payload: bytes
    record_id: str | None = None
    target_uri: str | None = None
    extra_headers: dict[str, str] = field(default_factory=dict)


def build_record_bytes(record: WarcRecord) -> bytes:
    rid = record.record_id or f"<urn:uuid:{uuid.uuid4()}>"
    if not rid.startswith("<"):
        rid = f"<{rid}>"
    lines = [b"WARC/1.0"]
    headers = [("WARC-Type", record.record_type), ("WARC-Record-ID", rid)]
    if record.target_uri:
        headers.append(("WARC-Target-URI", record.target_uri))
    headers.extend(sorted(record.extra_headers.items()))
    headers.append(("Content-Length", str(len(record.payload))))
    for name, value in headers:
        lines.append(f"{name}: {value}".encode("utf-8"))
    lines.append(b"")
    head = CRLF.join(lines) + CRLF
    return head + record.payload + CRLF + CRLF


def write_warc(records: Iterable[WarcRecord], gzip_members: bool = False) -> bytes:
    """Serialize records; with ``gzip_members`` each record is its own member."""
    out = bytearray()
    for record in records:
        blob = build_record_bytes(record)
        if gzip_members:
            comp = zlib.compressobj(9, zlib.DEFLATED, 31)
            out += comp.compress(blob) + comp.flush()
        else:
            out += blob
    return bytes(out)


@dataclass
class JsonlStats:
    lines: int = 0
    documents: int = 0
    line_errors: int = 0


def read_jsonl_corpus(lines: Iterable[str], stats: JsonlStats | None = None) -> Iterator[RawDocument]:
    """JSONL corpus input: one object per line with doc_id/url/text fields."""
    stats = stats if stats is not None else JsonlStats()
    for idx, raw in enumerate(lines):
        line = raw.strip()
        if not line:
            continue
        stats.lines += 1
        try:
            obj = json.loads(line)
            doc_id = str(obj["doc_id"])
            text = str(obj["text"])
        except (json.JSONDecodeError, KeyError, TypeError):
            stats.line_errors += 1
            continue
        stats.documents += 1
        url = obj.get("url")
        yield RawDocument(doc_id=doc_id, url=str(url) if url is not None else None, body=text)
