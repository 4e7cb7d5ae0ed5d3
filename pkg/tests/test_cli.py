"""End-to-end command-line checks via subprocess."""

from __future__ import annotations

import json
import os
import subprocess
import sys

import pytest

import helpers

HEADER = "name,rank,count,pctwhite,pctblack,pctapi,pctaian,pct2prace,pcthispanic\n"


def run_cli(*argv: str, env: dict | None = None) -> subprocess.CompletedProcess:
    environ = os.environ.copy()
    if env:
        environ.update(env)
    return subprocess.run([sys.executable, "-m", "sourceaudit.cli", *argv],
                          capture_output=True, text=True, env=environ)


def write_article(tmp_path, article_id: str):
    path = tmp_path / f"{article_id}.txt"
    path.write_text(helpers.article_body(article_id), encoding="utf-8")
    return path


@pytest.fixture()
def census_csv(tmp_path):
    """Thirty binary-separable surnames: ak* mostly white, oz* mostly black."""
    whites = [f"ak{s}" for s in
              ("ard", "ers", "ins", "ton", "ley", "man", "sen", "der", "wik",
               "bol", "rad", "gus", "tav", "nor", "lin")]
    others = [f"oz{s}" for s in
              ("uma", "emi", "olu", "ade", "chi", "nna", "eze", "oby", "ife",
               "uch", "obi", "aka", "udo", "nne", "agu")]
    lines = [HEADER.rstrip("\n")]
    rank = 1
    for name in whites:
        lines.append(f"{name},{rank},100,90.0,2.0,2.0,2.0,2.0,2.0")
        rank += 1
    for name in others:
        lines.append(f"{name},{rank},100,2.0,90.0,2.0,2.0,2.0,2.0")
        rank += 1
    path = tmp_path / "census.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# annotate
# ---------------------------------------------------------------------------

def test_annotate_json_matches_golden_quotes(tmp_path):
    result = run_cli("annotate", "--json", str(write_article(tmp_path, "f03")))
    assert result.returncode == 0, result.stderr
    payload = json.loads(result.stdout)
    golden = helpers.load_golden("annotations/f03.json")
    assert payload["article_id"] == "f03"
    assert payload["quotes"] == golden["quotes"]
    assert payload["summary"] == golden["summary"]


def test_annotate_json_is_single_line(tmp_path):
    result = run_cli("annotate", "--json", str(write_article(tmp_path, "f07")))
    assert result.returncode == 0
    assert result.stdout.count("\n") == 1


def test_annotate_text_format(tmp_path):
    result = run_cli("annotate", str(write_article(tmp_path, "f01")))
    assert result.returncode == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0] == "article: f01"
    assert lines[1] == "quotes: 2"
    assert any(line.startswith("[1] rule=R1") for line in lines)
    assert any("speaker: Jane Smith" in line for line in lines)
    assert "summary:" in lines


def test_annotate_unattributed_speaker_text(tmp_path):
    result = run_cli("annotate", str(write_article(tmp_path, "f15")))
    assert result.returncode == 0
    assert "speaker: (unattributed)" in result.stdout


def test_annotate_missing_file_exits_1(tmp_path):
    result = run_cli("annotate", str(tmp_path / "absent.txt"))
    assert result.returncode == 1
    assert result.stderr.startswith("error:")
    assert result.stdout == ""


def test_unknown_flag_exits_2(tmp_path):
    result = run_cli("annotate", "--bogus", str(write_article(tmp_path, "f01")))
    assert result.returncode == 2


def test_unknown_subcommand_exits_2():
    assert run_cli("frobnicate").returncode == 2


# ---------------------------------------------------------------------------
# train / eval
# ---------------------------------------------------------------------------

def test_train_then_eval_roundtrip(tmp_path, census_csv):
    out = tmp_path / "tiny.model"
    trained = run_cli("train", "--census-2010", str(census_csv),
                      "--classes", "binary", "--seed", "3", "--out", str(out))
    assert trained.returncode == 0, trained.stderr
    summary = json.loads(trained.stdout)
    assert summary["classes"] == "binary"
    assert summary["seed"] == 3
    assert summary["out"] == str(out)
    assert summary["vocab_size"] > 0
    assert len(summary["model_version"]) == 16
    assert out.exists()

    # Log records stream to stderr as NDJSON, one object per line.
    log_lines = [json.loads(line) for line in trained.stderr.splitlines() if line]
    assert log_lines[0] == {"event": "vocab", "size": summary["vocab_size"]}
    assert log_lines[-1]["event"] == "done"
    assert any("epoch" in record for record in log_lines)

    evaluated = run_cli("eval", "--model", str(out),
                        "--census-2010", str(census_csv),
                        "--split", "test", "--seed", "3")
    assert evaluated.returncode == 0, evaluated.stderr
    metrics = json.loads(evaluated.stdout)
    assert metrics["class_list"] == ["white", "nonwhite"]
    assert 0.0 <= metrics["accuracy"] <= 1.0
    # Test split is the remainder: 30 - floor(0.72*30) - floor(0.08*30) = 7.
    assert sum(sum(row) for row in metrics["confusion"]) == 7


def test_train_without_census_flags_exits_2(tmp_path):
    result = run_cli("train", "--out", str(tmp_path / "x.model"))
    assert result.returncode == 2
    assert "census" in result.stderr


def test_train_census_path_from_environment(tmp_path, census_csv):
    out = tmp_path / "env.model"
    result = run_cli("train", "--classes", "binary", "--out", str(out),
                     env={"SOURCEAUDIT_CENSUS_2010": str(census_csv)})
    assert result.returncode == 0, result.stderr
    assert out.exists()


def test_eval_missing_model_exits_1(tmp_path, census_csv):
    result = run_cli("eval", "--model", str(tmp_path / "absent.model"),
                     "--census-2010", str(census_csv))
    assert result.returncode == 1
    assert result.stderr.startswith("error:")


# ---------------------------------------------------------------------------
# ingest / report
# ---------------------------------------------------------------------------

def ingest_evening_star(tmp_path):
    manifest = helpers.load_manifest()
    subset = {k: v for k, v in manifest.items()
              if v["site"] == "evening-star"}
    archive = tmp_path / "evening-star.ndjson"
    archive.write_text(helpers.corpus_ndjson(subset), encoding="utf-8")
    store_dir = tmp_path / "store"
    result = run_cli("ingest", "--site", "evening-star", "--format", "ndjson",
                     "--store", str(store_dir), str(archive))
    return result, store_dir, len(subset)


def test_ingest_reports_counts(tmp_path):
    result, store_dir, expected = ingest_evening_star(tmp_path)
    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout) == {"stored": expected, "skipped": 0,
                                         "errors": []}
    assert store_dir.is_dir()


def test_report_defaults_to_most_recent_month(tmp_path):
    ingested, store_dir, _ = ingest_evening_star(tmp_path)
    assert ingested.returncode == 0, ingested.stderr
    result = run_cli("report", "--site", "evening-star",
                     "--store", str(store_dir))
    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout) == helpers.load_golden(
        "report_site_evening-star_2021-08.json")


def test_report_with_explicit_period(tmp_path):
    ingested, store_dir, _ = ingest_evening_star(tmp_path)
    assert ingested.returncode == 0
    result = run_cli("report", "--site", "evening-star",
                     "--store", str(store_dir),
                     "--from", "2021-07", "--to", "2021-07")
    assert result.returncode == 0, result.stderr
    report = json.loads(result.stdout)
    assert report["period"] == {"from": "2021-07", "to": "2021-07"}
    assert report["total_quotes"] > 0


def test_report_site_from_environment(tmp_path):
    ingested, store_dir, _ = ingest_evening_star(tmp_path)
    assert ingested.returncode == 0
    result = run_cli("report", "--store", str(store_dir),
                     env={"SOURCEAUDIT_SITE": "evening-star"})
    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout)["scope"]["site"] == "evening-star"


def test_report_rejects_malformed_month(tmp_path):
    ingested, store_dir, _ = ingest_evening_star(tmp_path)
    assert ingested.returncode == 0
    result = run_cli("report", "--site", "evening-star",
                     "--store", str(store_dir), "--from", "2021-7")
    assert result.returncode == 2


def test_report_unknown_site_exits_1(tmp_path):
    ingested, store_dir, _ = ingest_evening_star(tmp_path)
    assert ingested.returncode == 0
    result = run_cli("report", "--site", "nowhere", "--store", str(store_dir))
    assert result.returncode == 1
    assert result.stderr.startswith("error:")


def test_ingest_malformed_archive_exits_1(tmp_path):
    archive = tmp_path / "broken.xml"
    archive.write_text("<rss><channel><item>", encoding="utf-8")
    result = run_cli("ingest", "--site", "s", "--format", "xml",
                     "--store", str(tmp_path / "store"), str(archive))
    assert result.returncode == 1
    assert result.stderr.startswith("error:")
