import pytest

from tileswarm.similarity import TrigramProvider

# Short idea strings verified pairwise dissimilar (max cosine 0.147 over the
# ten, 0.105 over the first six) by tests/oracles/trigram_oracle.py; a test
# in test_similarity re-checks the bound so the corpus cannot rot.
DISSIMILAR_10 = [
    "bike lanes",
    "cheaper public transport",
    "ban junk food ads",
    "car free sundays",
    "more water fountains",
    "wider pavements",
    "open swimming pools",
    "quiet study rooms",
    "community veg gardens",
    "clean up the harbour",
]
DISSIMILAR_6 = DISSIMILAR_10[:6]


@pytest.fixture(scope="session")
def provider():
    return TrigramProvider()


@pytest.fixture
def dissimilar_6():
    return list(DISSIMILAR_6)


@pytest.fixture
def dissimilar_10():
    return list(DISSIMILAR_10)
