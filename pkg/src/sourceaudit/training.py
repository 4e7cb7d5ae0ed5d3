"""Training harness for the surname race/ethnicity classifier.

Covers the whole desk-scale workflow: read census surname CSVs, derive
argmax labels, split 72/8/20 deterministically, train the bidirectional
LSTM with Adam and early stopping, evaluate, and serialize models to a
documented binary format.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import nnet
from .demographics import (
    DEFAULT_EMBED_DIM,
    DEFAULT_HIDDEN_DIM,
    DEFAULT_MAX_SEQ_LEN,
    RACE_CLASSES_BINARY,
    RACE_CLASSES_SIX,
    RaceModel,
    TooShortNameError,
    encode_name_bigrams,
    name_bigrams,
    normalize_name,
)

# Census percentage columns, in the fixed tie-breaking order of the classes.
PERCENT_COLUMNS = {
    "white": "pctwhite",
    "black": "pctblack",
    "api": "pctapi",
    "aian": "pctaian",
    "two_or_more": "pct2prace",
    "hispanic": "pcthispanic",
}
REQUIRED_COLUMNS = ("name", "rank", "count", *PERCENT_COLUMNS.values())
SUPPRESSED = "(S)"


class MissingColumnError(ValueError):
    """A census file lacks one of the required columns."""


class MalformedRowError(ValueError):
    """A row has a missing or non-numeric unsuppressed percentage."""


class EmptyTrainingSetError(ValueError):
    pass


class EmptyTestSetError(ValueError):
    pass


class BadMagicError(ValueError):
    pass


class VersionMismatchError(ValueError):
    pass


class CorruptTensorError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledName:
    name: str
    label: str
    source_year: int
    percentages: dict[str, float]
    degenerate: bool = False


@dataclass(frozen=True)
class SplitSpec:
    seed: int
    fractions: tuple[float, float, float] = (0.72, 0.08, 0.20)

    def __post_init__(self):
        if abs(sum(self.fractions) - 1.0) > 1e-9:
            raise ValueError(f"fractions must sum to 1, got {self.fractions}")


@dataclass
class TrainConfig:
    classes: str = "six"  # "six" | "binary"
    epochs: int = 40
    batch_size: int = 4
    learning_rate: float = 2e-3
    seed: int = 0
    embed_dim: int = DEFAULT_EMBED_DIM
    hidden_dim: int = DEFAULT_HIDDEN_DIM
    max_seq_len: int = DEFAULT_MAX_SEQ_LEN
    patience: int = 3
    dtype: str = "float32"

    def class_list(self) -> tuple[str, ...]:
        return RACE_CLASSES_SIX if self.classes == "six" else RACE_CLASSES_BINARY


def _parse_row(row: dict[str, str], year: int) -> LabeledName:
    name = normalize_name(row["name"])
    if not name:
        raise MalformedRowError(f"empty name in row {row!r}")
    percentages: dict[str, float] = {}
    for label, column in PERCENT_COLUMNS.items():
        cell = (row[column] or "").strip()
        if cell == SUPPRESSED:
            percentages[label] = 0.0
            continue
        try:
            value = float(cell)
        except ValueError:
            raise MalformedRowError(f"non-numeric {column}={cell!r} for name {name!r}") from None
        if not (0.0 <= value <= 100.0) or math.isnan(value):
            raise MalformedRowError(f"{column}={cell!r} out of range for name {name!r}")
        percentages[label] = value
    degenerate = all(value == 0.0 for value in percentages.values())
    best = max(percentages.values())
    label = next(cls for cls in PERCENT_COLUMNS if percentages[cls] == best)
    return LabeledName(name=name, label=label, source_year=year,
                       percentages=percentages, degenerate=degenerate)


def load_census_labels(paths: Iterable[tuple[int, Path | str]]) -> list[LabeledName]:
    """Load and merge census surname files.

    ``paths`` is (source_year, path) pairs. Names are lowercased; suppressed
    "(S)" cells read as 0; the label is the argmax percentage with ties broken
    by the fixed class order; a surname present in both years keeps the 2010
    row. Result is sorted by name for deterministic downstream splits.
    """
    by_name: dict[str, LabeledName] = {}
    for year, path in sorted(paths, key=lambda pair: pair[0]):
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            header = [col.strip().lower() for col in (reader.fieldnames or [])]
            missing = [col for col in REQUIRED_COLUMNS if col not in header]
            if missing:
                raise MissingColumnError(f"{path}: missing columns {missing}")
            for raw in reader:
                row = {key.strip().lower(): value for key, value in raw.items() if key}
                labeled = _parse_row(row, year)
                existing = by_name.get(labeled.name)
                if existing is None or year >= existing.source_year:
                    by_name[labeled.name] = labeled
    return [by_name[name] for name in sorted(by_name)]


def binarize_labels(rows: Sequence[LabeledName]) -> list[LabeledName]:
    """Relabel to white vs nonwhite, preserving the argmax invariant."""
    out = []
    for row in rows:
        white = row.percentages["white"]
        nonwhite = sum(v for k, v in row.percentages.items() if k != "white")
        label = "white" if white >= nonwhite else "nonwhite"
        out.append(LabeledName(name=row.name, label=label, source_year=row.source_year,
                               percentages={"white": white, "nonwhite": nonwhite},
                               degenerate=row.degenerate))
    return out


def split_dataset(data: Sequence[LabeledName], spec: SplitSpec):
    """Deterministic 72/8/20 split: floor/floor/remainder of a seeded shuffle."""
    n = len(data)
    order = np.random.default_rng(spec.seed).permutation(n)
    n_train = math.floor(spec.fractions[0] * n)
    n_dev = math.floor(spec.fractions[1] * n)
    train = [data[i] for i in order[:n_train]]
    dev = [data[i] for i in order[n_train:n_train + n_dev]]
    test = [data[i] for i in order[n_train + n_dev:]]
    return train, dev, test


def build_bigram_vocab(names: Iterable[str]) -> dict[str, int]:
    """Dense bigram vocabulary (ids from 2; 0/1 reserved for PAD/UNK)."""
    seen: set[str] = set()
    for name in names:
        try:
            seen.update(name_bigrams(name))
        except TooShortNameError:
            continue
    return {bigram: idx + 2 for idx, bigram in enumerate(sorted(seen))}


def _encode_rows(rows: Sequence[LabeledName], vocab, class_index, max_seq_len):
    ids, labels, dropped = [], [], 0
    for row in rows:
        try:
            ids.append(encode_name_bigrams(row.name, vocab, max_seq_len))
        except TooShortNameError:
            dropped += 1
            continue
        labels.append(class_index[row.label])
    if ids:
        return np.stack(ids), np.asarray(labels, dtype=np.int64), dropped
    return np.zeros((0, max_seq_len), dtype=np.int64), np.zeros(0, dtype=np.int64), dropped


def _dataset_loss_accuracy(params, ids, labels, batch_size=512):
    total_loss = 0.0
    correct = 0
    for start in range(0, len(ids), batch_size):
        batch = ids[start:start + batch_size]
        truth = labels[start:start + batch_size]
        probs = nnet.forward(params, batch)
        eps = np.finfo(probs.dtype).tiny
        total_loss += float(-np.log(np.maximum(probs[np.arange(len(batch)), truth], eps)).sum())
        correct += int((probs.argmax(axis=1) == truth).sum())
    return total_loss / len(ids), correct / len(ids)


def _model_version(class_list, vocab, params) -> str:
    digest = hashlib.sha256()
    digest.update(json.dumps(list(class_list)).encode())
    digest.update(json.dumps(vocab, sort_keys=True).encode())
    for key in nnet.PARAM_KEYS:
        digest.update(params[key].tobytes())
    return digest.hexdigest()[:16]


def train_race_model(train: Sequence[LabeledName], dev: Sequence[LabeledName],
                     config: TrainConfig):
    """Train a classifier; returns (RaceModel, training log records).

    The bigram vocabulary is built from the training names only. Each epoch
    logs mean train loss plus dev loss/accuracy as JSON-serializable records;
    training stops early when dev accuracy has not improved for
    ``config.patience`` epochs, and the best-dev checkpoint is returned.
    Fully deterministic for a fixed config.
    """
    if not train:
        raise EmptyTrainingSetError("training split is empty")
    class_list = config.class_list()
    class_index = {cls: i for i, cls in enumerate(class_list)}
    dtype = np.dtype(config.dtype).type

    vocab = build_bigram_vocab(row.name for row in train)
    train_ids, train_labels, dropped_train = _encode_rows(train, vocab, class_index, config.max_seq_len)
    dev_ids, dev_labels, dropped_dev = _encode_rows(dev, vocab, class_index, config.max_seq_len)
    if not len(train_ids):
        raise EmptyTrainingSetError("no encodable training names")

    log: list[dict] = [{"event": "vocab", "size": len(vocab)}]
    if dropped_train or dropped_dev:
        log.append({"event": "dropped_short_names", "train": dropped_train, "dev": dropped_dev})

    rng = np.random.default_rng(config.seed)
    params = nnet.init_params(len(vocab) + 2, config.embed_dim, config.hidden_dim,
                              len(class_list), rng, dtype=dtype)
    optimizer = nnet.Adam(params, learning_rate=config.learning_rate)

    def snapshot():
        return {key: value.copy() for key, value in params.items()}

    baseline_train_loss, _ = _dataset_loss_accuracy(params, train_ids, train_labels)
    if len(dev_ids):
        dev_loss, dev_accuracy = _dataset_loss_accuracy(params, dev_ids, dev_labels)
    else:
        dev_loss, dev_accuracy = baseline_train_loss, 0.0
    log.append({"event": "epoch", "epoch": 0, "train_loss": baseline_train_loss,
                "dev_loss": dev_loss, "dev_accuracy": dev_accuracy})

    best = {"accuracy": dev_accuracy, "loss": dev_loss, "epoch": 0, "params": snapshot()}
    stale = 0
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(train_ids))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            chosen = order[start:start + config.batch_size]
            loss, grads = nnet.loss_and_gradients(params, train_ids[chosen], train_labels[chosen])
            optimizer.step(params, grads)
            epoch_loss += loss * len(chosen)
        epoch_loss /= len(train_ids)

        if len(dev_ids):
            dev_loss, dev_accuracy = _dataset_loss_accuracy(params, dev_ids, dev_labels)
        else:
            dev_loss, dev_accuracy = _dataset_loss_accuracy(params, train_ids, train_labels)
        log.append({"event": "epoch", "epoch": epoch, "train_loss": epoch_loss,
                    "dev_loss": dev_loss, "dev_accuracy": dev_accuracy})

        if dev_accuracy > best["accuracy"]:
            best = {"accuracy": dev_accuracy, "loss": dev_loss, "epoch": epoch,
                    "params": snapshot()}
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                log.append({"event": "early_stop", "epoch": epoch, "best_epoch": best["epoch"]})
                break

    version = _model_version(class_list, vocab, best["params"])
    log.append({"event": "done", "best_epoch": best["epoch"],
                "best_dev_accuracy": best["accuracy"], "model_version": version})
    model = RaceModel(class_list=class_list, bigram_vocab=vocab,
                      max_seq_len=config.max_seq_len, params=best["params"],
                      version=version)
    return model, log


@dataclass(frozen=True)
class EvalMetrics:
    accuracy: float
    per_class: dict[str, dict[str, float]]  # precision, recall, support
    confusion: list[list[int]]  # rows = true class, columns = predicted
    class_list: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class": self.per_class,
            "confusion": self.confusion,
            "class_list": list(self.class_list),
        }


def evaluate_model(model: RaceModel, test: Sequence[LabeledName],
                   batch_size: int = 512) -> EvalMetrics:
    """Accuracy, per-class precision/recall, and the confusion matrix."""
    if not test:
        raise EmptyTestSetError("test split is empty")
    class_index = {cls: i for i, cls in enumerate(model.class_list)}
    ids, labels, _ = _encode_rows(test, model.bigram_vocab, class_index, model.max_seq_len)
    if not len(ids):
        raise EmptyTestSetError("no encodable test names")

    n_classes = len(model.class_list)
    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    for start in range(0, len(ids), batch_size):
        probs = nnet.forward(model.params, ids[start:start + batch_size])
        predicted = probs.argmax(axis=1)
        for truth, guess in zip(labels[start:start + batch_size], predicted):
            confusion[truth, guess] += 1

    accuracy = float(np.trace(confusion) / confusion.sum())
    per_class = {}
    for i, cls in enumerate(model.class_list):
        support = int(confusion[i].sum())
        predicted_count = int(confusion[:, i].sum())
        true_positive = int(confusion[i, i])
        per_class[cls] = {
            "precision": true_positive / predicted_count if predicted_count else 0.0,
            "recall": true_positive / support if support else 0.0,
            "support": support,
        }
    return EvalMetrics(accuracy=accuracy, per_class=per_class,
                       confusion=confusion.tolist(), class_list=model.class_list)


# ---------------------------------------------------------------------------
# Model file format
#
#   bytes 0-7   magic b"NAMEMODL"
#   bytes 8-11  format version, little-endian uint32 (currently 1)
#   bytes 12-15 header length H, little-endian uint32
#   bytes 16-   H bytes of UTF-8 JSON: class_list, bigram_vocab, max_seq_len,
#               model version hash, and an ordered tensor manifest of
#               {name, shape, dtype} entries
#   then        each tensor's raw bytes, C-order, little-endian, in manifest
#               order, with no padding between tensors
# ---------------------------------------------------------------------------

MODEL_MAGIC = b"NAMEMODL"
MODEL_FORMAT_VERSION = 1

_DTYPE_CODES = {"float32": "<f4", "float64": "<f8"}


def save_model(model: RaceModel, path: Path | str) -> None:
    """Write a model file; load_model(save_model(m)) is prediction-identical."""
    manifest = []
    blobs = []
    for key in nnet.PARAM_KEYS:
        tensor = model.params[key]
        dtype_name = tensor.dtype.name
        if dtype_name not in _DTYPE_CODES:
            raise ValueError(f"unsupported tensor dtype {dtype_name}")
        little = tensor.astype(_DTYPE_CODES[dtype_name], copy=False)
        manifest.append({"name": key, "shape": list(tensor.shape), "dtype": dtype_name})
        blobs.append(np.ascontiguousarray(little).tobytes())
    header = json.dumps({
        "class_list": list(model.class_list),
        "bigram_vocab": model.bigram_vocab,
        "max_seq_len": model.max_seq_len,
        "version": model.version,
        "tensors": manifest,
    }).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(MODEL_MAGIC)
        handle.write(struct.pack("<I", MODEL_FORMAT_VERSION))
        handle.write(struct.pack("<I", len(header)))
        handle.write(header)
        for blob in blobs:
            handle.write(blob)


def load_model(path: Path | str) -> RaceModel:
    """Read a model file written by save_model.

    Raises BadMagicError, VersionMismatchError, or CorruptTensorError when
    the file is not a valid model of the supported format version.
    """
    with open(path, "rb") as handle:
        data = handle.read()
    if data[:8] != MODEL_MAGIC:
        raise BadMagicError(f"{path}: not a model file")
    (version,) = struct.unpack_from("<I", data, 8)
    if version != MODEL_FORMAT_VERSION:
        raise VersionMismatchError(f"{path}: format version {version}, expected {MODEL_FORMAT_VERSION}")
    (header_len,) = struct.unpack_from("<I", data, 12)
    try:
        header = json.loads(data[16:16 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptTensorError(f"{path}: unreadable header") from exc

    params: dict[str, np.ndarray] = {}
    offset = 16 + header_len
    for entry in header["tensors"]:
        code = _DTYPE_CODES.get(entry["dtype"])
        if code is None:
            raise CorruptTensorError(f"{path}: unknown dtype {entry['dtype']!r}")
        count = int(np.prod(entry["shape"])) if entry["shape"] else 1
        nbytes = count * np.dtype(code).itemsize
        if offset + nbytes > len(data):
            raise CorruptTensorError(f"{path}: tensor {entry['name']} truncated")
        flat = np.frombuffer(data, dtype=code, count=count, offset=offset)
        params[entry["name"]] = flat.reshape(entry["shape"]).astype(entry["dtype"])
        offset += nbytes
    if offset != len(data):
        raise CorruptTensorError(f"{path}: {len(data) - offset} trailing bytes")

    return RaceModel(
        class_list=tuple(header["class_list"]),
        bigram_vocab={k: int(v) for k, v in header["bigram_vocab"].items()},
        max_seq_len=int(header["max_seq_len"]),
        params=params,
        version=header.get("version", ""),
    )
