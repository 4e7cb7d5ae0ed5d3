"""Persistence, archive ingestion, scopes, and aggregate reporting."""

from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone

import pytest

import helpers
from sourceaudit.store import (
    DEFAULT_TOP_N,
    FileStore,
    MalformedArchiveError,
    MalformedPeriodError,
    MemoryStore,
    Scope,
    UnknownScopeError,
    aggregate_report,
    ingest_archive,
    list_sites,
    make_record,
    month_key,
    months_between,
    parse_iso_datetime,
    populated_months,
    to_utc,
    validate_month,
)

# ---------------------------------------------------------------------------
# Month utilities
# ---------------------------------------------------------------------------

def test_naive_datetimes_are_treated_as_utc():
    naive = datetime(2021, 7, 1, 12, 0, 0)
    assert to_utc(naive).tzinfo == timezone.utc
    assert to_utc(naive).hour == 12


def test_month_key_buckets_by_utc():
    # 20:00 on July 31st at UTC-7 is already August in UTC.
    late = datetime(2021, 7, 31, 20, 0, tzinfo=timezone(timedelta(hours=-7)))
    assert month_key(late) == "2021-08"
    assert month_key(datetime(2021, 7, 31, 23, 59)) == "2021-07"


@pytest.mark.parametrize("bad", ["2021-13", "2021-00", "202107", "2021-7",
                                 "21-07", "2021/07", ""])
def test_validate_month_rejects_malformed(bad):
    with pytest.raises(MalformedPeriodError):
        validate_month(bad)


def test_validate_month_accepts_and_returns():
    assert validate_month("2021-07") == "2021-07"
    assert validate_month("1999-12") == "1999-12"


def test_months_between_inclusive_across_year_boundary():
    assert months_between("2021-11", "2022-02") == \
        ["2021-11", "2021-12", "2022-01", "2022-02"]
    assert months_between("2021-07", "2021-07") == ["2021-07"]


def test_months_between_inverted_raises():
    with pytest.raises(MalformedPeriodError):
        months_between("2022-01", "2021-12")


def test_parse_iso_datetime_handles_z_suffix_and_garbage():
    parsed = parse_iso_datetime("2021-07-02T09:15:00Z")
    assert parsed == datetime(2021, 7, 2, 9, 15, tzinfo=timezone.utc)
    assert parse_iso_datetime("not a date") is None
    assert parse_iso_datetime("") is None


# ---------------------------------------------------------------------------
# Stores
# ---------------------------------------------------------------------------

def test_memory_store_upserts_and_scans_sorted():
    store = MemoryStore()
    store.put({"article_id": "b", "v": 1})
    store.put({"article_id": "a", "v": 1})
    store.put({"article_id": "b", "v": 2})
    records = list(store.scan())
    assert [r["article_id"] for r in records] == ["a", "b"]
    assert records[1]["v"] == 2


def test_file_store_roundtrip_and_upsert(tmp_path):
    store = FileStore(tmp_path / "db")
    record = {"article_id": "weird/id with spaces é", "n": 1}
    store.put(record)
    store.put({"article_id": "weird/id with spaces é", "n": 2})
    records = list(store.scan())
    assert len(records) == 1
    assert records[0]["n"] == 2
    assert not list((tmp_path / "db").glob("*.tmp"))


def test_file_store_matches_memory_store_reports(corpus_results):
    manifest = helpers.load_manifest()
    memory = MemoryStore()
    for article_id, result in corpus_results.items():
        fields = helpers.article_fields(article_id, manifest[article_id])
        memory.put(make_record(fields, result))
    import tempfile
    with tempfile.TemporaryDirectory() as root:
        disk = FileStore(root)
        for record in memory.scan():
            disk.put(dict(record))
        for scope in (Scope.site("daily-planet"),
                      Scope.author_on_site("evening-star", "Robin Vale")):
            mem_report = aggregate_report(memory, scope, ("2021-07", "2021-08"))
            disk_report = aggregate_report(disk, scope, ("2021-07", "2021-08"))
            assert mem_report.to_dict() == disk_report.to_dict()


def test_make_record_shape(corpus_results):
    manifest = helpers.load_manifest()
    fields = helpers.article_fields("f12", manifest["f12"])
    record = make_record(fields, corpus_results["f12"])
    assert record["article_id"] == "f12"
    assert record["site_id"] == "daily-planet"
    assert record["author"] == "Alex Kim"
    # The -07:00 offset is normalized into a UTC timestamp (next month).
    assert record["published_at"] == "2021-08-01T03:00:00+00:00"
    assert record["quotes"] == corpus_results["f12"].to_payload()["quotes"]


def test_make_record_keeps_missing_date_none(corpus_results):
    fields = helpers.article_fields("f01", helpers.load_manifest()["f01"])
    undated = type(fields)(article_id="x", site_id="s", author="", title="",
                           published_at=None)
    record = make_record(undated, corpus_results["f01"])
    assert record["published_at"] is None


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------

def ingest_corpus(store, site_filter=None):
    manifest = helpers.load_manifest()
    if site_filter:
        manifest = {k: v for k, v in manifest.items() if v["site"] == site_filter}
    by_site: dict[str, dict] = {}
    for article_id, meta in manifest.items():
        by_site.setdefault(meta["site"], {})[article_id] = meta
    totals = []
    for site, subset in by_site.items():
        text = helpers.corpus_ndjson(subset)
        totals.append(ingest_archive(store, text, site, "ndjson"))
    return totals


def test_ndjson_ingest_and_idempotent_reingest():
    store = MemoryStore()
    summaries = ingest_corpus(store)
    assert sum(s.stored for s in summaries) == 20
    assert all(not s.errors and s.skipped == 0 for s in summaries)
    before = {r["article_id"]: json.dumps(r, sort_keys=True) for r in store.scan()}
    ingest_corpus(store)  # re-ingest everything
    after = {r["article_id"]: json.dumps(r, sort_keys=True) for r in store.scan()}
    assert before == after


def test_ndjson_per_line_errors_and_skips(caplog):
    lines = [
        json.dumps({"article_id": "ok1", "title": "T", "author": "A",
                    "published_at": "2021-07-01T00:00:00Z",
                    "body": '"Five words sit right here," said Grace Liu.'}),
        "this is not json",
        json.dumps({"title": "missing id", "published_at": "2021-07-01T00:00:00Z",
                    "body": "x"}),
        json.dumps({"article_id": "undated", "title": "T", "author": "A",
                    "body": "no date"}),
        "",
    ]
    store = MemoryStore()
    with caplog.at_level("WARNING", logger="sourceaudit.store"):
        summary = ingest_archive(store, "\n".join(lines), "site-a", "ndjson")
    assert summary.stored == 1
    assert summary.skipped == 1
    assert len(summary.errors) == 2
    assert any("line 2" in err for err in summary.errors)
    assert any("line 3" in err for err in summary.errors)
    assert any("no parseable publication date" in r.message for r in caplog.records)
    assert [r["article_id"] for r in store.scan()] == ["ok1"]


XML_ARCHIVE = """<rss><channel>
<item>
  <title>Harbor vote</title>
  <author>Pat Jones</author>
  <pubDate>Fri, 02 Jul 2021 09:15:00 GMT</pubDate>
  <content>"The harbor budget passed every committee test," said Grace Liu.</content>
</item>
<item>
  <title>Undated piece</title>
  <author>Sam Field</author>
  <content>"Nobody recorded when this article ran," said Grace Liu.</content>
</item>
</channel></rss>"""


def test_xml_ingest_derives_stable_ids_and_skips_undated():
    store = MemoryStore()
    summary = ingest_archive(store, XML_ARCHIVE, "daily-planet", "xml")
    assert summary.stored == 1
    assert summary.skipped == 1
    record = next(iter(store.scan()))
    assert record["article_id"].startswith("daily-planet-")
    assert record["title"] == "Harbor vote"
    assert record["quotes"][0]["speaker"]["name"] == "Grace Liu"

    again = ingest_archive(store, XML_ARCHIVE, "daily-planet", "xml")
    assert again.stored == 1
    assert len(list(store.scan())) == 1  # same derived id, upsert


def test_xml_single_item_root():
    text = ("<item><title>Solo</title><author>A</author>"
            "<pubDate>Fri, 02 Jul 2021 09:15:00 GMT</pubDate>"
            "<content>plain text body</content></item>")
    store = MemoryStore()
    summary = ingest_archive(store, text, "s", "xml")
    assert summary.stored == 1


def test_malformed_xml_raises():
    with pytest.raises(MalformedArchiveError):
        ingest_archive(MemoryStore(), "<rss><item>", "s", "xml")


def test_unknown_format_raises():
    with pytest.raises(ValueError):
        ingest_archive(MemoryStore(), "", "s", "csv")


def test_bad_pubdate_counts_as_skip():
    text = ("<item><title>Bad date</title><pubDate>purple</pubDate>"
            "<content>body text here</content></item>")
    summary = ingest_archive(MemoryStore(), text, "s", "xml")
    assert summary.stored == 0
    assert summary.skipped == 1


# ---------------------------------------------------------------------------
# Scopes
# ---------------------------------------------------------------------------

def test_scope_constructors_and_dicts():
    assert Scope.site("a").to_dict() == {"kind": "site", "site": "a"}
    assert Scope.author_on_site("a", "Pat").to_dict() == \
        {"kind": "author", "site": "a", "author": "Pat"}
    assert Scope.multi_site("a", "b").to_dict() == \
        {"kind": "multi-site", "sites": ["a", "b"]}


def test_scope_validation_errors():
    with pytest.raises(ValueError):
        Scope(kind="site", sites=("a", "b"))
    with pytest.raises(ValueError):
        Scope(kind="author", sites=("a",), author="")
    with pytest.raises(ValueError):
        Scope(kind="multi-site", sites=())
    with pytest.raises(ValueError):
        Scope(kind="galaxy", sites=("a",))


def test_author_match_is_case_insensitive():
    scope = Scope.author_on_site("s", "pat jones")
    assert scope.matches({"site_id": "s", "author": "Pat Jones"})
    assert not scope.matches({"site_id": "s", "author": "Sam Field"})
    assert not scope.matches({"site_id": "other", "author": "Pat Jones"})


def test_list_sites_sorted_and_nonempty(corpus_store):
    assert list_sites(corpus_store) == ["daily-planet", "evening-star"]


def test_populated_months_and_unknown_scope(corpus_store):
    assert populated_months(corpus_store, Scope.site("daily-planet")) == \
        ["2021-07", "2021-08"]
    with pytest.raises(UnknownScopeError):
        populated_months(corpus_store, Scope.site("no-such-site"))


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def test_default_period_is_most_recent_populated_month(corpus_store):
    report = aggregate_report(corpus_store, Scope.site("evening-star"))
    assert report.period == ("2021-08", "2021-08")
    assert report.to_dict() == helpers.load_golden("report_site_evening-star_2021-08.json")


def test_full_period_report_matches_golden(corpus_store):
    report = aggregate_report(corpus_store, Scope.site("daily-planet"),
                              ("2021-07", "2021-08"))
    assert report.to_dict() == \
        helpers.load_golden("report_site_daily-planet_2021-07_2021-08.json")


def test_author_scope_report_matches_golden(corpus_store):
    report = aggregate_report(corpus_store,
                              Scope.author_on_site("daily-planet", "Pat Jones"),
                              ("2021-07", "2021-08"))
    assert report.to_dict() == \
        helpers.load_golden("report_author_daily-planet_pat-jones.json")


def test_report_equals_brute_force_recount(corpus_store):
    records = list(corpus_store.scan())
    cases = [
        (Scope.site("daily-planet"), {"daily-planet"}, None),
        (Scope.site("evening-star"), {"evening-star"}, None),
        (Scope.author_on_site("daily-planet", "Pat Jones"),
         {"daily-planet"}, "Pat Jones"),
        (Scope.multi_site("daily-planet", "evening-star"),
         {"daily-planet", "evening-star"}, None),
    ]
    for scope, sites, author in cases:
        for period in (("2021-07", "2021-07"), ("2021-08", "2021-08"),
                       ("2021-07", "2021-08")):
            report = aggregate_report(corpus_store, scope, period).to_dict()
            counts = helpers.brute_force_counts(records, sites, author, *period)
            helpers.assert_report_matches_counts(report, counts)


def test_month_additivity_is_exact(corpus_store):
    records = list(corpus_store.scan())
    sites = {"daily-planet"}
    july = helpers.brute_force_counts(records, sites, None, "2021-07", "2021-07")
    august = helpers.brute_force_counts(records, sites, None, "2021-08", "2021-08")
    full = helpers.brute_force_counts(records, sites, None, "2021-07", "2021-08")
    assert july["total"] + august["total"] == full["total"]
    for key in ("gender", "race", "persons", "organizations"):
        combined: dict[str, int] = dict(july[key])
        for label, count in august[key].items():
            combined[label] = combined.get(label, 0) + count
        assert combined == full[key], key
    assert july["titled"] + august["titled"] == full["titled"]

    # And the store's own reports agree with those integer counts.
    report_full = aggregate_report(corpus_store, Scope.site("daily-planet"),
                                   ("2021-07", "2021-08"))
    assert report_full.total_quotes == full["total"]


def test_upsert_leaves_reports_unchanged(corpus_results):
    manifest = helpers.load_manifest()
    store = MemoryStore()
    for article_id, result in corpus_results.items():
        store.put(make_record(helpers.article_fields(article_id, manifest[article_id]),
                              result))
    before = aggregate_report(store, Scope.site("daily-planet"),
                              ("2021-07", "2021-08")).to_dict()
    fields = helpers.article_fields("f03", manifest["f03"])
    store.put(make_record(fields, corpus_results["f03"]))
    after = aggregate_report(store, Scope.site("daily-planet"),
                             ("2021-07", "2021-08")).to_dict()
    assert before == after


def test_top_n_caps_lists(corpus_store):
    report = aggregate_report(corpus_store, Scope.site("daily-planet"),
                              ("2021-07", "2021-08"), top_n=1)
    assert len(report.top_persons) == 1
    uncapped = aggregate_report(corpus_store, Scope.site("daily-planet"),
                                ("2021-07", "2021-08"), top_n=None)
    assert len(uncapped.top_persons) >= len(report.top_persons)


def test_default_top_n_is_ten():
    assert DEFAULT_TOP_N == 10


def test_empty_period_yields_zero_report(corpus_store):
    report = aggregate_report(corpus_store, Scope.site("daily-planet"),
                              ("2019-01", "2019-02"))
    assert report.total_quotes == 0
    assert report.gender_proportions == {}
    assert report.top_persons == ()


def test_inverted_period_raises(corpus_store):
    with pytest.raises(MalformedPeriodError):
        aggregate_report(corpus_store, Scope.site("daily-planet"),
                         ("2021-08", "2021-07"))


def test_malformed_period_raises(corpus_store):
    with pytest.raises(MalformedPeriodError):
        aggregate_report(corpus_store, Scope.site("daily-planet"),
                         ("2021-8", "2021-09"))


def test_unknown_scope_raises(corpus_store):
    with pytest.raises(UnknownScopeError):
        aggregate_report(corpus_store, Scope.site("missing"))


def test_proportions_sum_to_one(corpus_store):
    report = aggregate_report(corpus_store, Scope.site("daily-planet"),
                              ("2021-07", "2021-08"))
    assert sum(report.gender_proportions.values()) == pytest.approx(1.0)
    assert sum(report.race_proportions.values()) == pytest.approx(1.0)
    assert 0.0 <= report.titled_proportion <= 1.0
