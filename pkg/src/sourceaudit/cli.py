"""Command-line entry point.

Subcommands: annotate, train, eval, ingest, report, serve. Machine-readable
results go to standard output; logs and diagnostics go to standard error.
Every flag may also be supplied through an environment variable named
``SOURCEAUDIT_<FLAG>`` (uppercased, dashes as underscores). Exit codes:
0 success, 1 operation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .demographics import DictionaryGenderClient, GenderDictionary
from .extraction import annotate_article
from .store import FileStore, Scope, aggregate_report, ingest_archive, validate_month
from .textcore import ArticleFields
from .training import (
    LabeledName,
    SplitSpec,
    TrainConfig,
    binarize_labels,
    evaluate_model,
    load_census_labels,
    load_model,
    save_model,
    split_dataset,
    train_race_model,
)


def _env_name(flag: str) -> str:
    return "SOURCEAUDIT_" + flag.lstrip("-").upper().replace("-", "_")


def _add_option(parser: argparse.ArgumentParser, flag: str, *,
                required: bool = False, **kwargs) -> None:
    """add_argument with an environment-variable fallback for the default."""
    env_value = os.environ.get(_env_name(flag))
    if env_value is not None:
        kwargs["default"] = env_value
        required = False
    parser.add_argument(flag, required=required, **kwargs)


# ---------------------------------------------------------------------------
# annotate
# ---------------------------------------------------------------------------

def _cmd_annotate(args: argparse.Namespace) -> int:
    body = Path(args.file).read_text(encoding="utf-8")
    fields = ArticleFields(article_id=Path(args.file).stem)
    result = annotate_article(fields, body)
    payload = result.to_payload()
    if args.json:
        print(json.dumps(payload, ensure_ascii=False, sort_keys=True))
        return 0

    print(f"article: {payload['article_id']}")
    print(f"quotes: {len(payload['quotes'])}")
    for index, quote in enumerate(payload["quotes"], 1):
        doubt = "yes" if quote["doubtful"] else "no"
        print(f"[{index}] rule={quote['rule']} doubtful={doubt} "
              f"words={quote['word_count']}")
        speaker = quote["speaker"]
        if speaker is None:
            print("    speaker: (unattributed)")
        else:
            parts = [f"speaker: {speaker['name']}"]
            if speaker["title"]:
                parts.append(f"title: {speaker['title']}")
            if speaker["organization"]:
                parts.append(f"org: {speaker['organization']}")
            parts.append(f"gender: {speaker['gender']['label']} "
                         f"({speaker['gender']['confidence']:.2f})")
            parts.append(f"race: {speaker['race']['label']} "
                         f"({speaker['race']['confidence']:.2f})")
            print("    " + " | ".join(parts))
        print(f'    "{quote["text"]}"')
    summary = payload["summary"]
    print("summary:")
    for key in ("gender_proportions", "race_proportions"):
        pairs = " ".join(f"{label}={value:.3f}"
                         for label, value in summary[key].items())
        print(f"  {key.split('_')[0]}: {pairs}" if pairs else
              f"  {key.split('_')[0]}: (none)")
    print(f"  titled: {summary['titled_proportion']:.3f}")
    return 0


# ---------------------------------------------------------------------------
# train / eval
# ---------------------------------------------------------------------------

def _census_rows(args: argparse.Namespace) -> list[LabeledName]:
    paths: list[tuple[int, str]] = []
    if args.census_2000:
        paths.append((2000, args.census_2000))
    if args.census_2010:
        paths.append((2010, args.census_2010))
    if not paths:
        args.parser.error("at least one of --census-2000/--census-2010 is required")
    return load_census_labels(paths)


def _cmd_train(args: argparse.Namespace) -> int:
    rows = _census_rows(args)
    if args.classes == "binary":
        rows = binarize_labels(rows)
    train, dev, _ = split_dataset(rows, SplitSpec(seed=args.seed))
    config = TrainConfig(classes=args.classes, seed=args.seed)
    model, log = train_race_model(train, dev, config)
    for record in log:
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
    save_model(model, args.out)
    vocab_size = next((r["size"] for r in log if r.get("event") == "vocab"), 0)
    done = next(r for r in log if r.get("event") == "done")
    print(json.dumps({
        "out": args.out,
        "classes": args.classes,
        "seed": args.seed,
        "vocab_size": vocab_size,
        "best_epoch": done["best_epoch"],
        "best_dev_accuracy": done["best_dev_accuracy"],
        "model_version": done["model_version"],
    }, sort_keys=True))
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    rows = _census_rows(args)
    if len(model.class_list) == 2:
        rows = binarize_labels(rows)
    train, dev, test = split_dataset(rows, SplitSpec(seed=args.seed))
    split = {"train": train, "dev": dev, "test": test}[args.split]
    metrics = evaluate_model(model, split)
    print(json.dumps(metrics.to_dict(), sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# ingest / report
# ---------------------------------------------------------------------------

def _cmd_ingest(args: argparse.Namespace) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    store = FileStore(args.store)
    summary = ingest_archive(store, text, args.site, args.format)
    print(json.dumps({
        "stored": summary.stored,
        "skipped": summary.skipped,
        "errors": list(summary.errors),
    }, sort_keys=True))
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    store = FileStore(args.store)
    period = None
    if args.from_month or args.to_month:
        period = (args.from_month or args.to_month,
                  args.to_month or args.from_month)
    report = aggregate_report(store, Scope.site(args.site), period)
    print(json.dumps(report.to_dict(), ensure_ascii=False, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------

def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import ServiceConfig, create_app

    gender_client = None
    if args.gender_dict:
        gender_client = DictionaryGenderClient(GenderDictionary.from_csv(args.gender_dict))
    race_model = load_model(args.race_model) if args.race_model else None
    store = FileStore(args.store) if args.store else None
    config = ServiceConfig(auth_token=args.auth_token, store=store,
                           gender_client=gender_client, race_model=race_model)
    app = create_app(config)
    print(f"serving on {args.host}:{args.port}", file=sys.stderr)
    uvicorn.run(app, host=args.host, port=args.port,
                log_level="warning", access_log=False)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sourceaudit",
        description="Audit who gets quoted: extract quotes, attribute "
                    "speakers, infer source demographics, aggregate reports.")
    commands = parser.add_subparsers(dest="command", required=True)

    annotate = commands.add_parser("annotate", help="annotate one article file")
    annotate.add_argument("file", help="UTF-8 article text or HTML")
    annotate.add_argument("--json", action="store_true",
                          help="emit the JSON annotation payload")
    annotate.set_defaults(func=_cmd_annotate, parser=annotate)

    train = commands.add_parser("train", help="train a surname classifier")
    _add_option(train, "--census-2000", default=None, dest="census_2000",
                help="census 2000 surname CSV")
    _add_option(train, "--census-2010", default=None, dest="census_2010",
                help="census 2010 surname CSV")
    _add_option(train, "--classes", default="six", choices=("binary", "six"))
    _add_option(train, "--out", required=True, help="output model file")
    _add_option(train, "--seed", type=int, default=0,
                help="seed for both the split and the training run")
    train.set_defaults(func=_cmd_train, parser=train)

    evaluate = commands.add_parser("eval", help="evaluate a model on a split")
    _add_option(evaluate, "--model", required=True)
    _add_option(evaluate, "--census-2000", default=None, dest="census_2000")
    _add_option(evaluate, "--census-2010", default=None, dest="census_2010")
    _add_option(evaluate, "--split", default="test",
                choices=("train", "dev", "test"))
    _add_option(evaluate, "--seed", type=int, default=0,
                help="split seed used at training time")
    evaluate.set_defaults(func=_cmd_eval, parser=evaluate)

    ingest = commands.add_parser("ingest", help="bulk-ingest an archive")
    _add_option(ingest, "--site", required=True)
    _add_option(ingest, "--format", required=True, choices=("xml", "ndjson"))
    _add_option(ingest, "--store", required=True, help="store directory")
    ingest.add_argument("file", help="archive file")
    ingest.set_defaults(func=_cmd_ingest, parser=ingest)

    report = commands.add_parser("report", help="print an aggregate report")
    _add_option(report, "--site", required=True)
    _add_option(report, "--store", required=True, help="store directory")
    _add_option(report, "--from", dest="from_month", default=None,
                type=validate_month, help="start month YYYY-MM")
    _add_option(report, "--to", dest="to_month", default=None,
                type=validate_month, help="end month YYYY-MM")
    report.set_defaults(func=_cmd_report, parser=report)

    serve = commands.add_parser("serve", help="run the HTTP service")
    _add_option(serve, "--host", default="127.0.0.1")
    _add_option(serve, "--port", type=int, default=8000)
    _add_option(serve, "--auth-token", required=True, dest="auth_token")
    _add_option(serve, "--store", default=None, help="store directory")
    _add_option(serve, "--gender-dict", default=None, dest="gender_dict",
                help="gender dictionary CSV (default: bundled)")
    _add_option(serve, "--race-model", default=None, dest="race_model",
                help="race model file (default: bundled six-way)")
    serve.set_defaults(func=_cmd_serve, parser=serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(message)s")
    try:
        return args.func(args)
    except (ValueError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
