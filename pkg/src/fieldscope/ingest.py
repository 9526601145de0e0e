"""Streaming readers for article records and citation edges, plus corpus grouping.

Articles are line-delimited JSON objects with fields id, year, title,
abstract, specialty. Citation files are delimited two-column text
(citing_id, cited_id); lines starting with '#' are ignored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InputError, MalformedRecord

DEFAULT_YEAR_RANGE = (1991, 2014)


@dataclass(frozen=True)
class ArticleRecord:
    id: str
    year: int
    title: str
    abstract: str
    specialty: str

    @property
    def text(self):
        return self.title if not self.abstract else self.title + " " + self.abstract


@dataclass(frozen=True)
class CitationEdge:
    citing_id: str
    cited_id: str


@dataclass(frozen=True)
class CorpusKey:
    field: str
    window: tuple  # (start_year, end_year) inclusive

    def __post_init__(self):
        if self.window[0] > self.window[1]:
            raise InputError(f"window start {self.window[0]} > end {self.window[1]}")


@dataclass
class IngestCounters:
    accepted: int = 0
    rejected_year: int = 0
    rejected_specialty: int = 0
    malformed: int = 0
    duplicate: int = 0
    empty_abstract: int = 0

    @property
    def total_lines(self):
        return (
            self.accepted
            + self.rejected_year
            + self.rejected_specialty
            + self.malformed
            + self.duplicate
        )


@dataclass
class CitationCounters:
    emitted: int = 0
    dropped_unknown: int = 0
    malformed: int = 0


_REQUIRED_FIELDS = ("id", "year", "title", "abstract", "specialty")


def _parse_article_line(line):
    try:
        obj = json.loads(line)
    except ValueError as exc:
        raise MalformedRecord(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedRecord("record is not an object")
    missing = [f for f in _REQUIRED_FIELDS if f not in obj]
    if missing:
        raise MalformedRecord(f"missing fields {missing}")
    try:
        year = int(obj["year"])
    except (TypeError, ValueError):
        raise MalformedRecord(f"year {obj['year']!r} is not an integer") from None
    rid = str(obj["id"])
    if not rid:
        raise MalformedRecord("empty id")
    return ArticleRecord(
        id=rid,
        year=year,
        title=str(obj["title"] or ""),
        abstract=str(obj["abstract"] or ""),
        specialty=str(obj["specialty"]),
    )


def load_articles(path, taxonomy, year_range=DEFAULT_YEAR_RANGE, strict=False,
                  counters=None):
    """Yield validated ArticleRecord objects from a JSONL file.

    Records failing the year range or whose specialty is not a taxonomy leaf
    are counted and skipped. Malformed lines and duplicate ids are fatal in
    strict mode, counted otherwise.
    """
    if counters is None:
        counters = IngestCounters()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read articles file {path}: {exc}") from exc
    seen = set()
    with fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                record = _parse_article_line(line)
            except MalformedRecord:
                if strict:
                    raise
                counters.malformed += 1
                continue
            if record.id in seen:
                if strict:
                    raise MalformedRecord(f"duplicate article id {record.id!r}")
                counters.duplicate += 1
                continue
            seen.add(record.id)
            if not (year_range[0] <= record.year <= year_range[1]):
                counters.rejected_year += 1
                continue
            if not taxonomy.is_leaf(record.specialty):
                counters.rejected_specialty += 1
                continue
            counters.accepted += 1
            if not record.abstract:
                counters.empty_abstract += 1
            yield record


def group_corpora(records, taxonomy, level, windows):
    """Group article ids by (field-at-level, time window).

    Each record lands in exactly one field group per level and in every
    window containing its year (windows may overlap for moving analyses).
    """
    windows = [tuple(w) for w in windows]
    for start, end in windows:
        if start > end:
            raise InputError(f"window start {start} > end {end}")
    groups = {}
    for record in records:
        group_field = taxonomy.ancestor_at(record.specialty, level)
        for window in windows:
            if window[0] <= record.year <= window[1]:
                key = CorpusKey(field=group_field, window=window)
                groups.setdefault(key, []).append(record.id)
    return groups


def load_citations(path, known_ids, counters=None):
    """Yield CitationEdge for lines whose both endpoints are known article ids."""
    if counters is None:
        counters = CitationCounters()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read citations file {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", "\t").split()
            if len(parts) != 2:
                counters.malformed += 1
                continue
            citing, cited = parts
            if citing in known_ids and cited in known_ids:
                counters.emitted += 1
                yield CitationEdge(citing_id=citing, cited_id=cited)
            else:
                counters.dropped_unknown += 1
