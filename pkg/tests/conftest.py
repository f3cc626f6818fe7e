import random

import pytest

from lossyhibe.groups import SECURE, TRANSPARENT, suite_new

BIG_PRIME = 2**61 - 1


@pytest.fixture(scope="session")
def secure():
    return suite_new(SECURE)


@pytest.fixture(scope="session")
def t11():
    return suite_new(TRANSPARENT, 11)


@pytest.fixture(scope="session")
def tbig():
    return suite_new(TRANSPARENT, BIG_PRIME)


@pytest.fixture
def rng():
    return random.Random(20240611)
