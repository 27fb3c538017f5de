import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dsteval import default_ontology

from helpers import make_fixture_corpus, oracle_predictions


@pytest.fixture(scope="session")
def ontology():
    return default_ontology()


@pytest.fixture(scope="session")
def fixture_corpus():
    return make_fixture_corpus(n_dialogues=50, seed=0)


@pytest.fixture()
def oracle(fixture_corpus):
    return oracle_predictions(fixture_corpus)
