"""Session-wide fixtures: bundled models, annotated fixture corpus, stores."""

from __future__ import annotations

import pytest

import helpers
from sourceaudit import resources, training
from sourceaudit.demographics import DictionaryGenderClient, GenderDictionary
from sourceaudit.store import MemoryStore, make_record


@pytest.fixture(scope="session")
def six_model():
    return training.load_model(resources.bundled_model_path("six"))


@pytest.fixture(scope="session")
def binary_model():
    return training.load_model(resources.bundled_model_path("binary"))


@pytest.fixture(scope="session")
def gender_client():
    return DictionaryGenderClient(GenderDictionary.bundled())


@pytest.fixture(scope="session")
def corpus_results():
    """Every fixture article annotated once with the bundled models."""
    return helpers.annotate_corpus()


@pytest.fixture(scope="session")
def corpus_store(corpus_results):
    """A store holding the full annotated fixture corpus."""
    manifest = helpers.load_manifest()
    store = MemoryStore()
    for article_id, result in corpus_results.items():
        fields = helpers.article_fields(article_id, manifest[article_id])
        store.put(make_record(fields, result))
    return store
