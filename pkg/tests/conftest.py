import pytest

from ringswarm.harness import run
from ringswarm.presets import load_preset


@pytest.fixture(scope="session")
def sim50_result():
    return run(load_preset("sim50"))


@pytest.fixture(scope="session")
def insert4_result():
    return run(load_preset("insert4"))


@pytest.fixture(scope="session")
def physical5_result():
    return run(load_preset("physical5"))
