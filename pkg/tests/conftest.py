"""Shared fixtures: the three filters used throughout the suite."""

import json
from pathlib import Path

import pytest

from isingrg.wavelet import make_daubechies_filter

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def haar():
    return make_daubechies_filter(1)


@pytest.fixture(scope="session")
def d4():
    return make_daubechies_filter(2)


@pytest.fixture(scope="session")
def d8():
    return make_daubechies_filter(4)


@pytest.fixture(scope="session")
def oracle_fixtures():
    with open(DATA_DIR / "oracle_fixtures.json") as fh:
        return json.load(fh)
