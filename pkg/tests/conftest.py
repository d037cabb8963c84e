import pytest
from hypothesis import settings

from tropdet import fixtures

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def fig1():
    return fixtures.load("fig1")


@pytest.fixture(scope="session")
def running():
    return fixtures.load("running")


@pytest.fixture(scope="session")
def det():
    return fixtures.load("det")


@pytest.fixture(scope="session")
def bounded_gap():
    return fixtures.load("bounded_gap")


@pytest.fixture(scope="session")
def twoloop():
    return fixtures.load("twoloop")


@pytest.fixture(scope="session")
def chain():
    return fixtures.load("chain")
