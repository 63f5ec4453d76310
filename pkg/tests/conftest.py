import random
from pathlib import Path

import pytest
from hypothesis import settings

from transemi import generators

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def trans_corpus():
    return generators.trans_corpus(100, cap=64)


@pytest.fixture(scope="session")
def abstract_m1():
    return generators.enumerate_valid_abstract(1)


@pytest.fixture(scope="session")
def abstract_m2():
    return generators.enumerate_valid_abstract(2)


@pytest.fixture(scope="session")
def abstract_m3():
    return generators.sample_valid_abstract(random.Random("abstract-m3"), 3, 20)


@pytest.fixture(scope="session")
def abstract_corpus(abstract_m1, abstract_m2, abstract_m3, trans_corpus):
    """Validated abstract systems: enumerated small ones, a sampled batch on
    three points, and the abstract images of every generated system."""
    return abstract_m1 + abstract_m2 + abstract_m3 + [s.abstract() for s in trans_corpus]
