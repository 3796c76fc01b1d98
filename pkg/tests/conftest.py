import random
import sys

from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from latnab.catalog import catalog  # noqa: E402


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture(scope="session")
def D4():
    return catalog("D4")


@pytest.fixture(scope="session")
def E8():
    return catalog("E8")


@pytest.fixture(scope="session")
def Lambda4():
    return catalog("Lambda4")


@pytest.fixture(scope="session")
def Lambda8():
    return catalog("Lambda8")
