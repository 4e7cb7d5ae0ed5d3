"""Regenerate golden files under tests/fixtures/golden/.

Run after any deliberate behavior change, then review the diff by hand
before committing.  Goldens pin annotation payloads for every fixture
article plus aggregate reports over the fixture corpus.
"""

from __future__ import annotations

import json
from pathlib import Path

from sourceaudit.extraction import annotate_article
from sourceaudit.store import MemoryStore, Scope, aggregate_report, make_record, parse_iso_datetime
from sourceaudit.textcore import ArticleFields

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"
GOLDEN = FIXTURES / "golden"


def dump(path: Path, payload: object) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def main() -> None:
    manifest = json.loads((FIXTURES / "corpus.json").read_text(encoding="utf-8"))
    store = MemoryStore()
    for article_id, meta in manifest.items():
        body = (FIXTURES / "articles" / f"{article_id}.txt").read_text(encoding="utf-8")
        fields = ArticleFields(
            article_id=article_id,
            site_id=meta["site"],
            author=meta["author"],
            title=f"Article {article_id}",
            published_at=parse_iso_datetime(meta["published_at"]),
        )
        result = annotate_article(fields, body)
        dump(GOLDEN / "annotations" / f"{article_id}.json", result.to_payload())
        store.put(make_record(fields, result))

    reports = {
        "report_site_daily-planet_2021-07_2021-08.json": (
            Scope.site("daily-planet"),
            ("2021-07", "2021-08"),
        ),
        "report_site_evening-star_2021-08.json": (Scope.site("evening-star"), None),
        "report_author_daily-planet_pat-jones.json": (
            Scope.author_on_site("daily-planet", "Pat Jones"),
            ("2021-07", "2021-08"),
        ),
    }
    for name, (scope, period) in reports.items():
        dump(GOLDEN / name, aggregate_report(store, scope, period=period).to_dict())
    print(f"wrote {len(manifest)} annotation goldens and {len(reports)} report goldens")


if __name__ == "__main__":
    main()
