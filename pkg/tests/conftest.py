import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from timeability.families import figure1


@pytest.fixture
def fig1a():
    return figure1("a")


@pytest.fixture
def fig1b():
    return figure1("b")


@pytest.fixture
def fig1c():
    return figure1("c")
