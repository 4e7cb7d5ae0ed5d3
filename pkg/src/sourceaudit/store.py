"""Article persistence, archive ingestion, and aggregate reporting.

Stored records pair article metadata with the annotation produced at ingest
time. Aggregation recomputes proportions from the stored quotes, so reports
are a pure function of the store contents: re-ingesting an article replaces
its record (upsert) and leaves every report unchanged.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime
from pathlib import Path
from typing import Iterator, Protocol

from .demographics import GenderClient, RaceModel
from .extraction import AnnotationResult, annotate_article
from .textcore import ArticleFields

logger = logging.getLogger("sourceaudit.store")

_MONTH_RE = re.compile(r"^\d{4}-(0[1-9]|1[0-2])$")

DEFAULT_TOP_N = 10


class MalformedArchiveError(ValueError):
    """The archive container itself cannot be parsed."""


class MalformedPeriodError(ValueError):
    """A month string is not of the form YYYY-MM, or the range is inverted."""


class UnknownScopeError(LookupError):
    """No stored article matches the requested scope."""


# ---------------------------------------------------------------------------
# Months
# ---------------------------------------------------------------------------

def to_utc(moment: datetime) -> datetime:
    """Normalize to UTC; naive datetimes are taken to already be UTC."""
    if moment.tzinfo is None:
        return moment.replace(tzinfo=timezone.utc)
    return moment.astimezone(timezone.utc)


def month_key(moment: datetime) -> str:
    utc = to_utc(moment)
    return f"{utc.year:04d}-{utc.month:02d}"


def validate_month(month: str) -> str:
    if not _MONTH_RE.match(month):
        raise MalformedPeriodError(f"month must be YYYY-MM, got {month!r}")
    return month


def months_between(first: str, last: str) -> list[str]:
    """Inclusive list of months from first to last."""
    validate_month(first)
    validate_month(last)
    if first > last:
        raise MalformedPeriodError(f"month range {first}..{last} is inverted")
    year, month = int(first[:4]), int(first[5:])
    out = []
    while True:
        current = f"{year:04d}-{month:02d}"
        out.append(current)
        if current == last:
            return out
        month += 1
        if month > 12:
            year, month = year + 1, 1


def parse_iso_datetime(value: str) -> datetime | None:
    try:
        return datetime.fromisoformat(value.replace("Z", "+00:00"))
    except (ValueError, AttributeError, TypeError):
        return None


# ---------------------------------------------------------------------------
# Storage
# ---------------------------------------------------------------------------

class Storage(Protocol):
    """Minimal persistence interface: upsert a record, scan all records."""

    def put(self, record: dict) -> None: ...

    def scan(self) -> Iterator[dict]: ...


class MemoryStore:
    """Dict-backed store for tests and ephemeral service instances."""

    def __init__(self):
        self._records: dict[str, dict] = {}

    def put(self, record: dict) -> None:
        self._records[record["article_id"]] = record

    def scan(self) -> Iterator[dict]:
        for article_id in sorted(self._records):
            yield self._records[article_id]


class FileStore:
    """One JSON file per article under a root directory.

    Filenames hash the article id, so ids may contain any character. Writes
    go through a temp file and an atomic replace.
    """

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _path(self, article_id: str) -> Path:
        digest = hashlib.sha1(article_id.encode("utf-8")).hexdigest()
        return self.root / f"{digest}.json"

    def put(self, record: dict) -> None:
        path = self._path(record["article_id"])
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, ensure_ascii=False, sort_keys=True),
                       encoding="utf-8")
        tmp.replace(path)

    def scan(self) -> Iterator[dict]:
        for path in sorted(self.root.glob("*.json")):
            yield json.loads(path.read_text(encoding="utf-8"))


def make_record(fields: ArticleFields, result: AnnotationResult) -> dict:
    """Stored form of one annotated article."""
    payload = result.to_payload()
    published = None
    if fields.published_at is not None:
        published = to_utc(fields.published_at).isoformat()
    return {
        "article_id": fields.article_id,
        "site_id": fields.site_id,
        "author": fields.author,
        "title": fields.title,
        "published_at": published,
        "quotes": payload["quotes"],
        "summary": payload["summary"],
    }


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IngestSummary:
    stored: int
    skipped: int
    errors: tuple[str, ...]


def _xml_items(text: str) -> list[dict]:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedArchiveError(f"unparseable XML archive: {exc}") from exc
    items = []
    # iter() yields the element itself first when the root is an <item>.
    nodes = list(root.iter("item"))
    for node in nodes:
        items.append({
            "title": node.findtext("title") or "",
            "author": node.findtext("author") or "",
            "pub_date": node.findtext("pubDate"),
            "body": node.findtext("content") or "",
        })
    return items


def _derived_article_id(site_id: str, title: str, pub_date: str) -> str:
    digest = hashlib.sha1(f"{site_id}|{title}|{pub_date}".encode("utf-8"))
    return f"{site_id}-{digest.hexdigest()[:16]}"


def ingest_archive(store: Storage, text: str, site_id: str, fmt: str,
                   gender_client: GenderClient | None = None,
                   race_model: RaceModel | None = None) -> IngestSummary:
    """Parse, annotate, and upsert every item of an archive.

    fmt "xml" expects repeated <item> elements with <title>, <author>,
    <pubDate> (RFC 1123), and <content>; item ids derive from site, title,
    and publication date, so re-ingestion is idempotent. fmt "ndjson"
    expects one JSON object per line with article_id, title, author,
    published_at (ISO 8601), and body. Items without a parseable
    publication date are skipped with a warning; other per-item failures
    are collected, never fatal.
    """
    stored = skipped = 0
    errors: list[str] = []

    def handle(article_id: str, title: str, author: str,
               published: datetime | None, body: str, label: str) -> None:
        nonlocal stored, skipped
        if published is None:
            logger.warning("skipping %s: no parseable publication date", label)
            skipped += 1
            return
        fields = ArticleFields(article_id=article_id, site_id=site_id,
                               author=author, title=title,
                               published_at=published)
        try:
            result = annotate_article(fields, body,
                                      gender_client=gender_client,
                                      race_model=race_model)
        except Exception as exc:  # per-item isolation
            errors.append(f"{label}: annotation failed: {exc}")
            return
        store.put(make_record(fields, result))
        stored += 1

    if fmt == "xml":
        for index, item in enumerate(_xml_items(text)):
            published = None
            if item["pub_date"]:
                try:
                    published = parsedate_to_datetime(item["pub_date"])
                except (ValueError, TypeError):
                    published = None
            article_id = _derived_article_id(site_id, item["title"],
                                             item["pub_date"] or "")
            handle(article_id, item["title"], item["author"], published,
                   item["body"], f"item {index}")
    elif fmt == "ndjson":
        for line_no, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                errors.append(f"line {line_no}: invalid JSON")
                continue
            article_id = str(obj.get("article_id") or "")
            if not article_id:
                errors.append(f"line {line_no}: missing article_id")
                continue
            published = parse_iso_datetime(obj.get("published_at") or "")
            handle(article_id, str(obj.get("title") or ""),
                   str(obj.get("author") or ""), published,
                   str(obj.get("body") or ""), f"line {line_no}")
    else:
        raise ValueError(f"unknown archive format {fmt!r}")

    return IngestSummary(stored=stored, skipped=skipped, errors=tuple(errors))


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scope:
    kind: str  # site | author | multi-site
    sites: tuple[str, ...]
    author: str = ""

    def __post_init__(self):
        if self.kind == "site":
            if len(self.sites) != 1 or self.author:
                raise ValueError("site scope takes exactly one site and no author")
        elif self.kind == "author":
            if len(self.sites) != 1 or not self.author:
                raise ValueError("author scope takes one site and an author")
        elif self.kind == "multi-site":
            if not self.sites or self.author:
                raise ValueError("multi-site scope takes sites and no author")
        else:
            raise ValueError(f"unknown scope kind {self.kind!r}")

    @classmethod
    def site(cls, site_id: str) -> "Scope":
        return cls(kind="site", sites=(site_id,))

    @classmethod
    def author_on_site(cls, site_id: str, author: str) -> "Scope":
        return cls(kind="author", sites=(site_id,), author=author)

    @classmethod
    def multi_site(cls, *site_ids: str) -> "Scope":
        return cls(kind="multi-site", sites=tuple(site_ids))

    def matches(self, record: dict) -> bool:
        if record.get("site_id") not in self.sites:
            return False
        if self.kind == "author":
            return str(record.get("author", "")).casefold() == self.author.casefold()
        return True

    def to_dict(self) -> dict:
        if self.kind == "site":
            return {"kind": "site", "site": self.sites[0]}
        if self.kind == "author":
            return {"kind": "author", "site": self.sites[0], "author": self.author}
        return {"kind": "multi-site", "sites": list(self.sites)}


@dataclass(frozen=True)
class AggregateReport:
    scope: Scope
    period: tuple[str | None, str | None]  # inclusive months, None when undated
    total_quotes: int
    gender_proportions: dict[str, float]
    race_proportions: dict[str, float]
    titled_proportion: float
    top_persons: tuple[tuple[str, int], ...]
    top_organizations: tuple[tuple[str, int], ...]

    def to_dict(self) -> dict:
        return {
            "scope": self.scope.to_dict(),
            "period": {"from": self.period[0], "to": self.period[1]},
            "total_quotes": self.total_quotes,
            "gender_proportions": self.gender_proportions,
            "race_proportions": self.race_proportions,
            "titled_proportion": self.titled_proportion,
            "top_persons": [{"name": name, "quotes": count}
                            for name, count in self.top_persons],
            "top_organizations": [{"name": name, "quotes": count}
                                  for name, count in self.top_organizations],
        }


def _record_month(record: dict) -> str | None:
    published = record.get("published_at")
    if not published:
        return None
    moment = parse_iso_datetime(published)
    return month_key(moment) if moment else None


def populated_months(store: Storage, scope: Scope) -> list[str]:
    """Sorted months for which the scope has at least one dated article."""
    months = set()
    matched = False
    for record in store.scan():
        if not scope.matches(record):
            continue
        matched = True
        month = _record_month(record)
        if month is not None:
            months.add(month)
    if not matched:
        raise UnknownScopeError(f"no stored articles for scope {scope.to_dict()}")
    return sorted(months)


def list_sites(store: Storage) -> list[str]:
    return sorted({record.get("site_id", "") for record in store.scan()} - {""})


def aggregate_report(store: Storage, scope: Scope,
                     period: tuple[str, str] | None = None,
                     top_n: int | None = DEFAULT_TOP_N) -> AggregateReport:
    """Gender/race/title proportions and top sources for a scope and period.

    The period is an inclusive (from_month, to_month) pair of YYYY-MM
    strings; None selects the scope's most recent populated month. Quotes
    with an unresolved speaker count under "unknown"; each proportion map
    sums to 1 whenever any quote exists.
    """
    months = populated_months(store, scope)
    if period is None:
        period = (months[-1], months[-1]) if months else (None, None)
    else:
        period = (validate_month(period[0]), validate_month(period[1]))
        months_between(*period)  # validates ordering

    gender: Counter[str] = Counter()
    race: Counter[str] = Counter()
    persons: Counter[str] = Counter()
    organizations: Counter[str] = Counter()
    titled = 0
    total = 0
    for record in store.scan():
        if not scope.matches(record):
            continue
        month = _record_month(record)
        if month is None or period[0] is None or not period[0] <= month <= period[1]:
            continue
        for quote in record["quotes"]:
            total += 1
            speaker = quote.get("speaker")
            if speaker is None:
                gender["unknown"] += 1
                race["unknown"] += 1
                continue
            gender[speaker["gender"]["label"]] += 1
            race[speaker["race"]["label"]] += 1
            if speaker["title"]:
                titled += 1
            persons[speaker["name"]] += 1
            if speaker["organization"]:
                organizations[speaker["organization"]] += 1

    def proportions(counter: Counter[str]) -> dict[str, float]:
        return {label: counter[label] / total for label in sorted(counter)}

    def top(counter: Counter[str]) -> tuple[tuple[str, int], ...]:
        ranked = sorted(counter.items(), key=lambda pair: (-pair[1], pair[0]))
        return tuple(ranked if top_n is None else ranked[:top_n])

    if total == 0:
        return AggregateReport(scope=scope, period=period, total_quotes=0,
                               gender_proportions={}, race_proportions={},
                               titled_proportion=0.0, top_persons=(),
                               top_organizations=())
    return AggregateReport(
        scope=scope,
        period=period,
        total_quotes=total,
        gender_proportions=proportions(gender),
        race_proportions=proportions(race),
        titled_proportion=titled / total,
        top_persons=top(persons),
        top_organizations=top(organizations),
    )
