"""People knowledge base: person records, demographic grouping, name gazetteer.

The dataset file is UTF-8 text, one person per line, eight tab-separated
fields in fixed order::

    entity_id  primary_name  aliases(|)  gender  birth_country  citizenships(|)  ethnic_groups(|)  occupations(|)

``gender`` is one of man/woman/other/unknown (case-insensitive, empty means
unknown); country fields hold ISO-3166 alpha-2 codes; list fields join their
entries with ``|`` and may be empty.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

from .text import norm_tokens, normalize_surface


class Gender(Enum):
    MAN = "man"
    WOMAN = "woman"
    OTHER = "other"
    UNKNOWN = "unknown"


class OriginAxis(Enum):
    WESTERN = "western"
    POSTCOLONIAL = "postcolonial"


class DemographicGroup(Enum):
    """Gender x origin cell; UNKNOWN collects records missing either axis."""

    WESTERN_MAN = "western_man"
    POSTCOLONIAL_MAN = "postcolonial_man"
    WESTERN_WOMAN = "western_woman"
    POSTCOLONIAL_WOMAN = "postcolonial_woman"
    UNKNOWN = "unknown"

    @property
    def gender_axis(self) -> Gender | None:
        if self is DemographicGroup.UNKNOWN:
            return None
        return Gender.MAN if self.value.endswith("man") and not self.value.endswith("woman") else Gender.WOMAN

    @property
    def origin_axis(self) -> OriginAxis | None:
        if self is DemographicGroup.UNKNOWN:
            return None
        return OriginAxis.WESTERN if self.value.startswith("western") else OriginAxis.POSTCOLONIAL

    @property
    def abbrev(self) -> str:
        return _GROUP_ABBREV[self]


# Display abbreviations used by the CSV/markdown report tables.
_GROUP_ABBREV = {
    DemographicGroup.WESTERN_MAN: "w.m.",
    DemographicGroup.POSTCOLONIAL_MAN: "p-c.m",
    DemographicGroup.WESTERN_WOMAN: "w.w.",
    DemographicGroup.POSTCOLONIAL_WOMAN: "p-c. w.",
    DemographicGroup.UNKNOWN: "unknown",
}

#: The four cells reported in group statistics, in table order.
REPORT_GROUPS = (
    DemographicGroup.WESTERN_MAN,
    DemographicGroup.POSTCOLONIAL_MAN,
    DemographicGroup.WESTERN_WOMAN,
    DemographicGroup.POSTCOLONIAL_WOMAN,
)

ALL_GROUPS = REPORT_GROUPS + (DemographicGroup.UNKNOWN,)

_GENDER_VALUES = {g.value: g for g in Gender}
_GENDER_VALUES[""] = Gender.UNKNOWN


@dataclass(frozen=True)
class PersonRecord:
    entity_id: str
    primary_name: str
    aliases: tuple[str, ...] = ()
    gender: Gender = Gender.UNKNOWN
    birth_country: str | None = None
    citizenship: tuple[str, ...] = ()
    ethnic_groups: tuple[str, ...] = ()
    occupations: tuple[str, ...] = ()

    def names(self) -> Iterator[str]:
        yield self.primary_name
        yield from self.aliases


class PeopleFormatError(ValueError):
    """More than half of the input lines were malformed."""


class RegionMapError(ValueError):
    """Region map file is empty or malformed."""


@dataclass(frozen=True)
class RegionMap:
    """Partition config: western country codes plus post-colonial minority labels.

    The western set ships as editable config (EU/EFTA, UK, US, CA, AU, NZ by
    default) and every group statistic depends on it, so reports embed
    ``content_hash`` for provenance. The minority label list is a small
    non-authoritative starter set.
    """

    western_countries: frozenset[str]
    postcolonial_minority_labels: frozenset[str]

    def content_hash(self) -> str:
        canon = "western:" + ",".join(sorted(self.western_countries))
        canon += "\nminorities:" + ",".join(sorted(self.postcolonial_minority_labels))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def normalize_label(label: str) -> str:
    return normalize_surface(label)


def parse_region_map(lines: Iterable[str]) -> RegionMap:
    """Parse the plain-text region config: one code/label per line under
    ``[western]`` / ``[minorities]`` headers, ``#`` comments allowed."""
    western: set[str] = set()
    minorities: set[str] = set()
    section = None
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower() == "[western]":
            section = western
        elif line.lower() == "[minorities]":
            section = minorities
        elif section is western:
            code = line.upper()
            if len(code) != 2 or not code.isalpha():
                raise RegionMapError(f"invalid country code in [western]: {line!r}")
            section.add(code)
        elif section is minorities:
            section.add(normalize_label(line))
        else:
            raise RegionMapError(f"entry before any section header: {line!r}")
    if not western:
        raise RegionMapError("region map defines no [western] countries")
    return RegionMap(frozenset(western), frozenset(minorities))


def load_region_map(path: str | Path) -> RegionMap:
    with open(path, encoding="utf-8") as fh:
        return parse_region_map(fh)


def default_region_map() -> RegionMap:
    data = resources.files("filteraudit.data").joinpath("default_regions.txt").read_text("utf-8")
    return parse_region_map(data.splitlines())


@dataclass
class PeopleDataset:
    records: list[PersonRecord]
    by_id: dict[str, PersonRecord]
    skipped: int = 0


def _parse_country(fieldval: str) -> str | None:
    code = fieldval.strip()
    if not code:
        return None
    code = code.upper()
    if len(code) != 2 or not code.isalpha():
        raise ValueError(f"bad country code {fieldval!r}")
    return code


def _split_list(fieldval: str) -> list[str]:
    return [part.strip() for part in fieldval.split("|") if part.strip()]


def _parse_line(line: str) -> PersonRecord:
    parts = line.split("\t")
    if len(parts) != 8:
        raise ValueError(f"expected 8 fields, got {len(parts)}")
    entity_id = parts[0].strip()
    primary_name = parts[1].strip()
    if not entity_id or not primary_name:
        raise ValueError("empty entity_id or primary_name")
    gender_key = parts[3].strip().casefold()
    if gender_key not in _GENDER_VALUES:
        raise ValueError(f"unknown gender value {parts[3]!r}")
    aliases: list[str] = []
    seen = set()
    for alias in _split_list(parts[2]):
        key = alias.casefold()
        if key not in seen:
            seen.add(key)
            aliases.append(alias)
    citizenship = []
    for code in _split_list(parts[5]):
        parsed = _parse_country(code)
        if parsed is not None:
            citizenship.append(parsed)
    return PersonRecord(
        entity_id=entity_id,
        primary_name=primary_name,
        aliases=tuple(aliases),
        gender=_GENDER_VALUES[gender_key],
        birth_country=_parse_country(parts[4]),
        citizenship=tuple(citizenship),
        ethnic_groups=tuple(_split_list(parts[6])),
        occupations=tuple(_split_list(parts[7])),
    )


def parse_person_records(lines: Iterable[str]) -> PeopleDataset:
    """Parse the People Dataset from line-delimited records.

    Malformed lines (wrong arity, missing id/name, bad codes, duplicate ids)
    are skipped and counted; more than 50% malformed raises
    :class:`PeopleFormatError`. I/O errors from the underlying stream
    propagate.
    """
    records: list[PersonRecord] = []
    by_id: dict[str, PersonRecord] = {}
    skipped = 0
    total = 0
    for raw in lines:
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        total += 1
        try:
            rec = _parse_line(line)
            if rec.entity_id in by_id:
                raise ValueError(f"duplicate entity_id {rec.entity_id}")
        except ValueError:
            skipped += 1
            continue
        records.append(rec)
        by_id[rec.entity_id] = rec
    if total and skipped * 2 > total:
        raise PeopleFormatError(f"{skipped}/{total} lines malformed")
    return PeopleDataset(records=records, by_id=by_id, skipped=skipped)


def load_people_dataset(path: str | Path) -> PeopleDataset:
    with open(path, encoding="utf-8") as fh:
        return parse_person_records(fh)


def format_person_record(rec: PersonRecord) -> str:
    """Inverse of the line parser, used when writing dataset artifacts."""
    return "\t".join(
        (
            rec.entity_id,
            rec.primary_name,
            "|".join(rec.aliases),
            rec.gender.value,
            rec.birth_country or "",
            "|".join(rec.citizenship),
            "|".join(rec.ethnic_groups),
            "|".join(rec.occupations),
        )
    )


def classify_group(record: PersonRecord, region_map: RegionMap) -> DemographicGroup:
    """Assign the demographic cell for one record.

    Precedence: minority ethnic-group label, then birth country, then
    citizenship; no signal (or gender other/unknown) lands in UNKNOWN.
    Citizenship is consulted in sorted code order so list order never
    matters. Total function: never raises.
    """
    if record.gender not in (Gender.MAN, Gender.WOMAN):
        return DemographicGroup.UNKNOWN
    origin: OriginAxis | None = None
    if any(normalize_label(e) in region_map.postcolonial_minority_labels for e in record.ethnic_groups):
        origin = OriginAxis.POSTCOLONIAL
    elif record.birth_country is not None:
        origin = OriginAxis.WESTERN if record.birth_country in region_map.western_countries else OriginAxis.POSTCOLONIAL
    elif record.citizenship:
        first = sorted(record.citizenship)[0]
        origin = OriginAxis.WESTERN if first in region_map.western_countries else OriginAxis.POSTCOLONIAL
    if origin is None:
        return DemographicGroup.UNKNOWN
    if record.gender is Gender.MAN:
        return DemographicGroup.WESTERN_MAN if origin is OriginAxis.WESTERN else DemographicGroup.POSTCOLONIAL_MAN
    return DemographicGroup.WESTERN_WOMAN if origin is OriginAxis.WESTERN else DemographicGroup.POSTCOLONIAL_WOMAN


def kb_stats(records: Iterable[PersonRecord], region_map: RegionMap) -> dict[DemographicGroup, int]:
    """Record count per demographic group; the five counts sum to the total."""
    counts = {group: 0 for group in ALL_GROUPS}
    for rec in records:
        counts[classify_group(rec, region_map)] += 1
    return counts


class Gazetteer:
    """Immutable-after-build name table: normalized surface -> entity ids.

    Multi-token surfaces are kept as token sequences in a trie so mention
    detection can do longest-match scans over tokenized sentences. Safe for
    concurrent reads once built.
    """

    def __init__(self) -> None:
        self._by_surface: dict[str, list[str]] = {}
        self._trie: dict = {}
        self._size = 0

    #: trie key under which terminal payloads (surface, ids) are stored
    _LEAF = None

    def _add(self, surface: str, entity_id: str) -> None:
        key = normalize_surface(surface)
        tokens = norm_tokens(surface)
        if not key or not tokens:
            return
        ids = self._by_surface.setdefault(key, [])
        if entity_id not in ids:
            ids.append(entity_id)
        node = self._trie
        for tok in tokens:
            node = node.setdefault(tok, {})
        leaf = node.get(self._LEAF)
        if leaf is None:
            node[self._LEAF] = (key, [entity_id])
            self._size += 1
        elif entity_id not in leaf[1]:
            leaf[1].append(entity_id)

    def lookup(self, surface: str) -> list[str]:
        """Entity ids for an exact normalized surface, sorted; [] if absent."""
        return sorted(self._by_surface.get(normalize_surface(surface), ()))

    def longest_match(self, norms: list[str], start: int) -> tuple[int, str, list[str]] | None:
        """Longest gazetteer key matching ``norms[start:]``.

        Returns (token length, matched key, sorted candidate ids) or None.
        """
        node = self._trie
        best: tuple[int, str, list[str]] | None = None
        i = start
        while i < len(norms):
            node = node.get(norms[i])
            if node is None:
                break
            i += 1
            leaf = node.get(self._LEAF)
            if leaf is not None:
                best = (i - start, leaf[0], sorted(leaf[1]))
        return best

    def __len__(self) -> int:
        return self._size

    def __contains__(self, surface: str) -> bool:
        return normalize_surface(surface) in self._by_surface

    def surfaces(self) -> Iterator[str]:
        return iter(sorted(self._by_surface))


def build_gazetteer(records: Iterable[PersonRecord]) -> Gazetteer:
    """Index every primary name and alias; ambiguous surfaces keep all ids."""
    gaz = Gazetteer()
    for rec in records:
        for name in rec.names():
            gaz._add(name, rec.entity_id)
    return gaz
