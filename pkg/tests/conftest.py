from __future__ import annotations

from pathlib import Path

import pytest

from qred.algebra import complete
from qred.parser import parse_algebra

FIXTURES = Path(__file__).parent / "fixtures"


def load(name: str, bound: int = 12):
    text = (FIXTURES / f"{name}.alg").read_text(encoding="utf-8")
    return complete(parse_algebra(text), bound)


@pytest.fixture(scope="session")
def dual_numbers():
    return load("dual_numbers")


@pytest.fixture(scope="session")
def line2():
    return load("line2")


@pytest.fixture(scope="session")
def tri_dual():
    return load("tri_dual")


@pytest.fixture(scope="session")
def bowtie():
    return load("bowtie")


@pytest.fixture(scope="session")
def corner_mono():
    return load("corner_mono")
