from __future__ import annotations

from fractions import Fraction

import pytest

from gasket_interp.core import Cell, PointAddress


def addr(text: str, n: int) -> PointAddress:
    return PointAddress.parse(text, n)


def cell(text: str, n: int) -> Cell:
    return Cell.parse(text, n)


F = Fraction


@pytest.fixture
def fig5_pair():
    return addr("[1 1 | 0]", 2), addr("[2 2 | 0]", 2)


@pytest.fixture
def eight_pair():
    return addr("[2 0 2 | 1]", 3), addr("[3 0 3 | 1]", 3)
