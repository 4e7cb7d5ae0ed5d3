"""Train and save the bundled race models from the bundled census sample.

Deterministic: fixed split seed 4 and training seed 13. The resulting files
ship inside the package (src/sourceaudit/data/models/) and are what the
annotate CLI and the HTTP service load by default.

Run from the repo root:  python3 scripts/train_bundled_models.py
"""

from __future__ import annotations

import json
from pathlib import Path

from sourceaudit import training
from sourceaudit.demographics import predict_race
from sourceaudit.resources import census_sample_path

SPLIT_SEED = 4
TRAIN_SEED = 13

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "sourceaudit" / "data" / "models"


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    data = training.load_census_labels([(2010, census_sample_path())])
    spec = training.SplitSpec(seed=SPLIT_SEED)

    for classes, rows in (("six", data), ("binary", training.binarize_labels(data))):
        train, dev, test = training.split_dataset(rows, spec)
        config = training.TrainConfig(classes=classes, seed=TRAIN_SEED, epochs=60)
        model, log = training.train_race_model(train, dev, config)
        metrics = training.evaluate_model(model, test)
        out = OUT_DIR / f"race_{classes}.bin"
        training.save_model(model, out)
        print(json.dumps({
            "classes": classes,
            "out": str(out),
            "vocab": len(model.bigram_vocab),
            "test_accuracy": metrics.accuracy,
            "model_version": model.version,
            "best_epoch": log[-1]["best_epoch"],
        }))

    six = training.load_model(OUT_DIR / "race_six.bin")
    for name, expected in (("washington", "black"), ("nguyen", "api")):
        got = predict_race(name, six)
        status = "ok" if got.label == expected else "MISMATCH"
        print(json.dumps({"check": name, "expected": expected,
                          "predicted": got.label, "status": status}))


if __name__ == "__main__":
    main()
