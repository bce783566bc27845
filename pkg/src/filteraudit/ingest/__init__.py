"""Corpus ingestion: archive parsing, language ID, sentence splitting, gates."""
from ..text import Token, tokenize
from .gate import Document, GateCounters, GateStatus, document_gate, sample_corpus
from .langid import detect_language
from .sentences import ABBREVIATIONS, Sentence, split_sentences
from .warc import (
    JsonlStats,
    RawDocument,
    WarcFormatError,
    WarcReader,
    WarcRecord,
    WarcStats,
    build_record_bytes,
    parse_warc,
    read_jsonl_corpus,
    strip_html,
    write_warc,
)

__all__ = [
    "ABBREVIATIONS",
    "Document",
    "GateCounters",
    "GateStatus",
    "JsonlStats",
    "RawDocument",
    "Sentence",
    "Token",
    "WarcFormatError",
    "WarcReader",
    "WarcRecord",
    "WarcStats",
    "build_record_bytes",
    "detect_language",
    "document_gate",
    "parse_warc",
    "read_jsonl_corpus",
    "sample_corpus",
    "split_sentences",
    "strip_html",
    "tokenize",
    "write_warc",
]
