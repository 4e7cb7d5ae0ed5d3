"""Shared paths, corpus loading, and metric helpers for the test suite."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from sourceaudit import nnet
from sourceaudit.demographics import (
    RACE_CLASSES_BINARY,
    DemographicPrediction,
    RaceModel,
    unknown_prediction,
)
from sourceaudit.extraction import AnnotationResult, annotate_article
from sourceaudit.store import parse_iso_datetime
from sourceaudit.textcore import ArticleFields
from sourceaudit.training import build_bigram_vocab

TESTS_DIR = Path(__file__).resolve().parent
FIXTURES = TESTS_DIR / "fixtures"
ARTICLES = FIXTURES / "articles"
LABELS = FIXTURES / "labels"
GOLDEN = FIXTURES / "golden"

# Seeds used to produce the bundled models; reruns must reproduce them.
SPLIT_SEED = 4
TRAIN_SEED = 13
BUNDLED_EPOCHS = 60


def load_manifest() -> dict[str, dict]:
    return json.loads((FIXTURES / "corpus.json").read_text(encoding="utf-8"))


def article_body(article_id: str) -> str:
    return (ARTICLES / f"{article_id}.txt").read_text(encoding="utf-8")


def article_fields(article_id: str, meta: dict) -> ArticleFields:
    return ArticleFields(
        article_id=article_id,
        site_id=meta["site"],
        author=meta["author"],
        title=f"Article {article_id}",
        published_at=parse_iso_datetime(meta["published_at"]),
    )


def load_labels(article_id: str) -> list[dict]:
    data = json.loads((LABELS / f"{article_id}.json").read_text(encoding="utf-8"))
    return data["quotes"]


def load_golden(name: str) -> dict:
    return json.loads((GOLDEN / name).read_text(encoding="utf-8"))


def corpus_ndjson(manifest: dict[str, dict]) -> str:
    """The fixture corpus as an ingestible newline-delimited JSON archive."""
    lines = []
    for article_id, meta in manifest.items():
        lines.append(json.dumps({
            "article_id": article_id,
            "title": f"Article {article_id}",
            "author": meta["author"],
            "published_at": meta["published_at"],
            "body": article_body(article_id),
        }, ensure_ascii=False))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ExtractionMetrics:
    true_positive: int
    false_positive: int
    false_negative: int
    matched: int
    correct: int
    mismatches: tuple[str, ...]

    @property
    def precision(self) -> float:
        predicted = self.true_positive + self.false_positive
        return self.true_positive / predicted if predicted else 0.0

    @property
    def recall(self) -> float:
        gold = self.true_positive + self.false_negative
        return self.true_positive / gold if gold else 0.0

    @property
    def attribution_accuracy(self) -> float:
        return self.correct / self.matched if self.matched else 0.0


def extraction_metrics(results: dict[str, AnnotationResult]) -> ExtractionMetrics:
    """Score annotation results against the hand labels.

    Quote spans match on exact inner text; attribution is scored over the
    matched set only, comparing the canonical speaker name (or None).
    """
    tp = fp = fn = matched = correct = 0
    mismatches: list[str] = []
    for article_id, result in sorted(results.items()):
        gold = {q["text"]: q["speaker"] for q in load_labels(article_id)}
        payload = result.to_payload()
        predicted = {}
        for quote in payload["quotes"]:
            speaker = quote["speaker"]
            predicted[quote["text"]] = speaker["name"] if speaker else None

        for text, want in gold.items():
            if text not in predicted:
                fn += 1
                mismatches.append(f"{article_id} MISSED {text[:40]!r}")
                continue
            tp += 1
            matched += 1
            got = predicted[text]
            if got == want:
                correct += 1
            else:
                mismatches.append(
                    f"{article_id} WRONG-SPEAKER {text[:40]!r} got {got!r} want {want!r}")
        for text in predicted:
            if text not in gold:
                fp += 1
                mismatches.append(f"{article_id} SPURIOUS {text[:40]!r}")
    return ExtractionMetrics(true_positive=tp, false_positive=fp, false_negative=fn,
                             matched=matched, correct=correct,
                             mismatches=tuple(mismatches))


def annotate_corpus(gender_client=None, race_model=None) -> dict[str, AnnotationResult]:
    manifest = load_manifest()
    return {
        article_id: annotate_article(article_fields(article_id, meta),
                                     article_body(article_id),
                                     gender_client=gender_client,
                                     race_model=race_model)
        for article_id, meta in manifest.items()
    }


# ---------------------------------------------------------------------------
# Lightweight stand-ins for the demographic models, for speed-sensitive tests.
# ---------------------------------------------------------------------------

class StubGenderClient:
    """Always answers unknown; keeps randomized-document tests offline-fast."""

    def gender_for(self, first_name: str) -> DemographicPrediction:
        return unknown_prediction("dictionary")


def tiny_race_model(seed: int = 0) -> RaceModel:
    """A small untrained but structurally valid binary classifier."""
    vocab = build_bigram_vocab(["maria", "lopez", "chen", "walsh", "okafor"])
    rng = np.random.default_rng(seed)
    params = nnet.init_params(len(vocab) + 2, embed_dim=4, hidden_dim=3,
                              num_classes=2, rng=rng)
    return RaceModel(class_list=RACE_CLASSES_BINARY, bigram_vocab=vocab,
                     max_seq_len=8, params=params, version="tiny-test")


# ---------------------------------------------------------------------------
# Randomized documents for the quote-filter properties.
# ---------------------------------------------------------------------------

_FILLER = ("the", "committee", "reviewed", "harbor", "budget", "plans",
           "during", "afternoon", "session", "votes", "over", "draft")


def build_random_article(seed: int) -> str:
    """Paragraphs of filler prose with quotes of wildly varying lengths.

    Quote word counts are drawn from below, around, and far above the keep
    and long thresholds; some quotes get a named speaker with a cue verb so
    both resolved and unresolved annotations occur.
    """
    rng = random.Random(seed)
    paragraphs = []
    for _ in range(rng.randint(1, 4)):
        bits = []
        for _ in range(rng.randint(1, 3)):
            bits.append(" ".join(rng.choices(_FILLER, k=rng.randint(3, 8))) + ".")
            if rng.random() < 0.85:
                count = rng.choice((1, 2, 3, 4, 5, 6, 7, 12, 40, 99, 100, 101, 130))
                quote = " ".join(rng.choices(_FILLER, k=count))
                if rng.random() < 0.4:
                    bits.append(f'"{quote}," Maria Lopez said.')
                else:
                    bits.append(f'"{quote}."')
        paragraphs.append(" ".join(bits))
    return "\n\n".join(paragraphs)


def assert_filter_properties(payload: dict) -> None:
    """The three kept-quote invariants every annotation payload must satisfy."""
    for quote in payload["quotes"]:
        assert quote["word_count"] >= 5, f"kept quote under 5 words: {quote['text']!r}"
        if quote["word_count"] > 100:
            assert quote["long"], f"quote of {quote['word_count']} words not flagged long"
            assert quote["doubtful"], "long quote not doubtful"
        if quote["speaker"] is None:
            assert quote["doubtful"], "unresolved speaker not doubtful"


# ---------------------------------------------------------------------------
# Independent brute-force recount used as the aggregation oracle.
# ---------------------------------------------------------------------------

def brute_force_counts(records: list[dict], site_ids: set[str],
                       author: str | None, month_lo: str, month_hi: str) -> dict:
    """Recount a report from raw records, sharing no code with the store.

    Months are recomputed UTC-by-hand from the stored ISO timestamps.
    Returns integer counters so additivity can be checked exactly.
    """
    from datetime import datetime, timezone

    gender: dict[str, int] = {}
    race: dict[str, int] = {}
    persons: dict[str, int] = {}
    organizations: dict[str, int] = {}
    titled = 0
    total = 0
    for record in records:
        if record.get("site_id") not in site_ids:
            continue
        if author is not None and record.get("author", "").casefold() != author.casefold():
            continue
        published = record.get("published_at")
        if not published:
            continue
        moment = datetime.fromisoformat(published.replace("Z", "+00:00"))
        if moment.tzinfo is None:
            moment = moment.replace(tzinfo=timezone.utc)
        moment = moment.astimezone(timezone.utc)
        month = f"{moment.year:04d}-{moment.month:02d}"
        if not (month_lo <= month <= month_hi):
            continue
        for quote in record["quotes"]:
            total += 1
            speaker = quote["speaker"]
            if speaker is None:
                gender["unknown"] = gender.get("unknown", 0) + 1
                race["unknown"] = race.get("unknown", 0) + 1
                continue
            g = speaker["gender"]["label"]
            r = speaker["race"]["label"]
            gender[g] = gender.get(g, 0) + 1
            race[r] = race.get(r, 0) + 1
            persons[speaker["name"]] = persons.get(speaker["name"], 0) + 1
            if speaker["organization"]:
                org = speaker["organization"]
                organizations[org] = organizations.get(org, 0) + 1
            if speaker["title"]:
                titled += 1
    return {"gender": gender, "race": race, "persons": persons,
            "organizations": organizations, "titled": titled, "total": total}


def assert_report_matches_counts(report_dict: dict, counts: dict,
                                 top_n: int = 10) -> None:
    """Check an aggregate report against brute-force integer counts."""
    total = counts["total"]
    assert report_dict["total_quotes"] == total
    if total == 0:
        assert report_dict["gender_proportions"] == {}
        assert report_dict["race_proportions"] == {}
        assert report_dict["titled_proportion"] == 0.0
        assert report_dict["top_persons"] == []
        assert report_dict["top_organizations"] == []
        return
    assert report_dict["gender_proportions"] == \
        {k: v / total for k, v in sorted(counts["gender"].items())}
    assert report_dict["race_proportions"] == \
        {k: v / total for k, v in sorted(counts["race"].items())}
    assert report_dict["titled_proportion"] == counts["titled"] / total

    def expected_top(counter: dict[str, int]) -> list[dict]:
        ranked = sorted(counter.items(), key=lambda pair: (-pair[1], pair[0]))
        return [{"name": name, "quotes": n} for name, n in ranked[:top_n]]

    assert report_dict["top_persons"] == expected_top(counts["persons"])
    assert report_dict["top_organizations"] == expected_top(counts["organizations"])


def random_surnames(count: int, seed: int) -> list[str]:
    """Pronounceable random surnames, at least two letters each."""
    rng = random.Random(seed)
    consonants = "bcdfgklmnprstvw"
    vowels = "aeiou"
    names = []
    for _ in range(count):
        length = rng.randint(1, 4)
        names.append("".join(rng.choice(consonants) + rng.choice(vowels)
                             for _ in range(length)))
    return names
