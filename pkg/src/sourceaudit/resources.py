"""Loaders for the bundled lexicon and data files.

All lexicons are plain-text files (UTF-8, one entry per line, ``#`` comments)
shipped inside the package so that behaviour is versioned with the code.
Loaders cache their results; the returned collections are immutable.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources


def _data_path(name: str):
    return resources.files("sourceaudit.data").joinpath(name)


def read_lexicon(name: str) -> tuple[str, ...]:
    """Read a bundled lexicon file, skipping blanks and comment lines."""
    text = _data_path(name).read_text(encoding="utf-8")
    return tuple(
        line for line in (raw.strip() for raw in text.splitlines())
        if line and not line.startswith("#")
    )


@lru_cache(maxsize=None)
def abbreviations() -> frozenset[str]:
    """Sentence-boundary stop-list, e.g. ``Dr.``, ``U.S.`` (case preserved)."""
    return frozenset(read_lexicon("abbreviations.txt"))


@lru_cache(maxsize=None)
def cue_verbs() -> frozenset[str]:
    """Reporting verbs signalling attribution, lowercase."""
    return frozenset(read_lexicon("cue_verbs.txt"))


@lru_cache(maxsize=None)
def title_words() -> frozenset[str]:
    """Personal-title role words, lowercase."""
    return frozenset(read_lexicon("titles.txt"))


@lru_cache(maxsize=None)
def org_suffixes() -> frozenset[str]:
    """Words marking a capitalized sequence as an organization, lowercase."""
    return frozenset(read_lexicon("org_suffixes.txt"))


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    """Sentence-initial-only stopwords, lowercase."""
    return frozenset(read_lexicon("stopwords.txt"))


@lru_cache(maxsize=None)
def non_person_words() -> frozenset[str]:
    """Capitalized words excluded from person names at any position."""
    return frozenset(read_lexicon("non_person_words.txt"))


@lru_cache(maxsize=None)
def place_suffixes() -> frozenset[str]:
    """Run-final words marking a street or way rather than a person."""
    return frozenset(read_lexicon("place_suffixes.txt"))


def gender_dictionary_path():
    """Path-like handle for the bundled first-name gender dictionary CSV."""
    return _data_path("gender_names.csv")


def census_sample_path():
    """Path-like handle for the bundled 1,000-name census-style sample."""
    return _data_path("census_sample.csv")


def bundled_model_path(classes: str):
    """Path-like handle for a bundled pre-trained race model.

    ``classes`` is ``"binary"`` or ``"six"``.
    """
    return _data_path(f"models/race_{classes}.bin")
