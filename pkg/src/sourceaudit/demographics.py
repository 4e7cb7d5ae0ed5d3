"""Name-based demographic inference.

Gender comes from a bundled first-name dictionary (with a pluggable
remote-service client interface); race/ethnicity comes from a character
bi-gram bidirectional LSTM over the surname. Every prediction carries the
full class distribution, a confidence score, and the source it came from
so that downstream consumers can surface uncertainty instead of hiding it.
"""

from __future__ import annotations

import csv
import json
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from . import nnet, resources
from .nnet import PAD_ID, UNK_ID

RACE_CLASSES_SIX = ("white", "black", "api", "aian", "two_or_more", "hispanic")
RACE_CLASSES_BINARY = ("white", "nonwhite")

GENDER_RATIO_THRESHOLD = 0.9
DEFAULT_MAX_SEQ_LEN = 15
DEFAULT_EMBED_DIM = 32
DEFAULT_HIDDEN_DIM = 64


class TooShortNameError(ValueError):
    """Raised when a name has fewer than two letters after normalization."""


class ModelInvalidError(ValueError):
    """Raised when model tensors fail shape validation."""


@dataclass(frozen=True)
class DemographicPrediction:
    label: str
    distribution: dict[str, float]
    confidence: float
    source: str  # "dictionary" | "model" | "remote"
    model_version: str = ""


def unknown_prediction(source: str) -> DemographicPrediction:
    return DemographicPrediction(label="unknown", distribution={}, confidence=0.0,
                                 source=source)


# ---------------------------------------------------------------------------
# Gender
# ---------------------------------------------------------------------------

class GenderDictionary:
    """First-name counts: lowercase name -> (female_count, male_count)."""

    def __init__(self, counts: dict[str, tuple[int, int]]):
        for name, (female, male) in counts.items():
            if female < 0 or male < 0 or female + male == 0:
                raise ValueError(f"invalid counts for {name!r}: {(female, male)}")
        self._counts = dict(counts)

    def __len__(self) -> int:
        return len(self._counts)

    def lookup(self, name: str) -> tuple[int, int] | None:
        return self._counts.get(name)

    @classmethod
    def from_csv(cls, path) -> "GenderDictionary":
        """Load ``name,female_count,male_count`` rows (header required)."""
        counts: dict[str, tuple[int, int]] = {}
        with open(path, encoding="utf-8", newline="") as handle:
            for row in csv.DictReader(handle):
                counts[row["name"].strip().lower()] = (
                    int(row["female_count"]), int(row["male_count"]))
        return cls(counts)

    @classmethod
    def bundled(cls) -> "GenderDictionary":
        with resources.gender_dictionary_path().open(encoding="utf-8") as handle:
            counts = {
                row["name"].strip().lower(): (int(row["female_count"]), int(row["male_count"]))
                for row in csv.DictReader(handle)
            }
        return cls(counts)


def infer_gender(first_name: str, dictionary: GenderDictionary) -> DemographicPrediction:
    """Dictionary-ratio gender inference.

    The label is assigned only when the majority ratio reaches
    ``GENDER_RATIO_THRESHOLD``; anything weaker is an honest ``unknown``.
    Empty or absent names yield ``unknown`` with confidence 0.
    """
    key = first_name.strip().lower()
    if not key:
        return unknown_prediction("dictionary")
    counts = dictionary.lookup(key)
    if counts is None:
        return unknown_prediction("dictionary")
    female, male = counts
    total = female + male
    ratio = max(female, male) / total
    distribution = {"female": female / total, "male": male / total}
    if ratio >= GENDER_RATIO_THRESHOLD:
        label = "female" if female > male else "male"
    else:
        label = "unknown"
    return DemographicPrediction(label=label, distribution=distribution,
                                 confidence=ratio, source="dictionary")


class GenderClient(Protocol):
    """Anything that maps a first name to a gender prediction."""

    def gender_for(self, first_name: str) -> DemographicPrediction: ...


@dataclass(frozen=True)
class DictionaryGenderClient:
    """Default gender client backed by the bundled dictionary."""

    dictionary: GenderDictionary

    def gender_for(self, first_name: str) -> DemographicPrediction:
        return infer_gender(first_name, self.dictionary)


@dataclass(frozen=True)
class RemoteGenderClient:
    """Client for an external name-to-gender HTTP service.

    Expects a JSON object with ``gender`` and ``accuracy`` (percent) fields,
    the convention used by the common commercial services. Selected by
    configuration only; nothing in the engine requires it.
    """

    base_url: str
    api_key: str = ""
    timeout: float = 5.0

    def gender_for(self, first_name: str) -> DemographicPrediction:
        query = {"name": first_name}
        if self.api_key:
            query["key"] = self.api_key
        url = f"{self.base_url}?{urllib.parse.urlencode(query)}"
        with urllib.request.urlopen(url, timeout=self.timeout) as response:
            payload = json.load(response)
        label = payload.get("gender") or "unknown"
        confidence = float(payload.get("accuracy", 0.0)) / 100.0
        distribution = {label: confidence} if label != "unknown" else {}
        return DemographicPrediction(label=label, distribution=distribution,
                                     confidence=confidence, source="remote")


# ---------------------------------------------------------------------------
# Race / ethnicity
# ---------------------------------------------------------------------------

def normalize_name(name: str) -> str:
    """Lowercase and strip every non-alphabetic character."""
    return "".join(ch for ch in name.lower() if ch.isalpha())


def name_bigrams(name: str) -> list[str]:
    """Consecutive overlapping character 2-grams of a normalized name."""
    normalized = normalize_name(name)
    if len(normalized) < 2:
        raise TooShortNameError(f"need at least 2 letters, got {normalized!r}")
    return [normalized[i:i + 2] for i in range(len(normalized) - 1)]


def encode_name_bigrams(name: str, vocab: dict[str, int],
                        max_seq_len: int = DEFAULT_MAX_SEQ_LEN) -> np.ndarray:
    """Encode a name as a PAD-right-padded vector of bigram ids.

    Unknown bigrams map to UNK; the sequence is truncated to ``max_seq_len``.
    Raises TooShortNameError when the normalized name has under two letters.
    """
    ids = [vocab.get(bigram, UNK_ID) for bigram in name_bigrams(name)][:max_seq_len]
    out = np.full(max_seq_len, PAD_ID, dtype=np.int64)
    out[:len(ids)] = ids
    return out


@dataclass
class RaceModel:
    """A trained surname classifier: vocabulary, dimensions, and tensors."""

    class_list: tuple[str, ...]
    bigram_vocab: dict[str, int]
    max_seq_len: int
    params: dict[str, np.ndarray]
    version: str = ""

    def __post_init__(self):
        self.validate()

    @property
    def embed_dim(self) -> int:
        return self.params["embedding"].shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.params["fwd_wh"].shape[0]

    def validate(self) -> None:
        if len(self.class_list) not in (2, 6):
            raise ModelInvalidError(f"class list must have 2 or 6 entries, got {len(self.class_list)}")
        ids = sorted(self.bigram_vocab.values())
        if ids != list(range(2, len(ids) + 2)):
            raise ModelInvalidError("vocab ids must be dense in [2, |vocab|+1]")
        missing = [key for key in nnet.PARAM_KEYS if key not in self.params]
        if missing:
            raise ModelInvalidError(f"missing tensors: {missing}")
        vocab_rows = len(self.bigram_vocab) + 2
        embed = self.params["embedding"]
        if embed.ndim != 2 or embed.shape[0] != vocab_rows:
            raise ModelInvalidError(f"embedding shape {embed.shape} does not cover {vocab_rows} ids")
        e = embed.shape[1]
        h = self.params["fwd_wh"].shape[0]
        expected = {
            "fwd_wx": (e, 4 * h), "fwd_wh": (h, 4 * h), "fwd_b": (4 * h,),
            "bwd_wx": (e, 4 * h), "bwd_wh": (h, 4 * h), "bwd_b": (4 * h,),
            "dense_w": (2 * h, len(self.class_list)),
            "dense_b": (len(self.class_list),),
        }
        for key, shape in expected.items():
            if self.params[key].shape != shape:
                raise ModelInvalidError(
                    f"tensor {key} has shape {self.params[key].shape}, expected {shape}")


def predict_race_batch(names: list[str], model: RaceModel) -> list[DemographicPrediction]:
    """Vectorized prediction; raises TooShortNameError on any bad name."""
    encoded = np.stack([
        encode_name_bigrams(name, model.bigram_vocab, model.max_seq_len)
        for name in names
    ])
    probs = nnet.forward(model.params, encoded)
    predictions = []
    for row in probs:
        idx = int(np.argmax(row))
        distribution = {cls: float(p) for cls, p in zip(model.class_list, row)}
        predictions.append(DemographicPrediction(
            label=model.class_list[idx],
            distribution=distribution,
            confidence=float(row[idx]),
            source="model",
            model_version=model.version,
        ))
    return predictions


def predict_race(name: str, model: RaceModel) -> DemographicPrediction:
    """Predict race/ethnicity from a surname.

    Deterministic, case-insensitive, and indifferent to non-alphabetic
    characters. Confidence is the maximum class probability.
    """
    return predict_race_batch([name], model)[0]
