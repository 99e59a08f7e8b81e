"""Seeded random points, cells and configurations.

Every helper takes a :class:`random.Random` so that a seed fixes the output.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .core import Cell, PointAddress, apply_map, canonicalize, same_point
from .errors import NoCommonPath
from .interpolation import CommonPath, build_common_path


def random_address(rng: random.Random, n: int, max_len: int = 6) -> PointAddress:
    word = tuple(rng.randrange(n + 1) for _ in range(rng.randint(0, max_len)))
    return canonicalize(PointAddress(word, rng.randrange(n + 1), n))


def random_cell(rng: random.Random, n: int, min_level: int = 1, max_level: int = 4) -> Cell:
    return Cell(tuple(rng.randrange(n + 1) for _ in range(rng.randint(min_level, max_level))), n)


def random_point_in(rng: random.Random, cell: Cell, max_len: int = 4) -> PointAddress:
    return apply_map(cell.word, random_address(rng, cell.n, max_len))


def random_distinct_pair(rng: random.Random, n: int, max_len: int = 6) -> tuple[PointAddress, PointAddress]:
    while True:
        x, y = random_address(rng, n, max_len), random_address(rng, n, max_len)
        if not same_point(x, y):
            return x, y


def rational_in(rng: random.Random, lo: Fraction, hi: Fraction, steps: int = 16) -> Fraction:
    """One of the ``steps + 1`` equally spaced rationals in ``[lo, hi]``."""
    return lo + (hi - lo) * Fraction(rng.randint(0, steps), steps)


def regular_cell_pair(
    rng: random.Random,
    n_choices=(2, 3, 4),
    min_level: int = 1,
    max_level: int = 4,
    max_tries: int = 10_000,
) -> CommonPath:
    """Random disjoint cells joined by a regular common path."""
    for _ in range(max_tries):
        n = rng.choice(n_choices)
        A = random_cell(rng, n, min_level, max_level)
        B = random_cell(rng, n, min_level, max_level)
        try:
            cp = build_common_path(A, B)
        except NoCommonPath:
            continue
        if cp.regular:
            return cp
    raise RuntimeError("no regular configuration found")


def cell_point_pair(
    rng: random.Random,
    n_choices=(2, 3, 4),
    min_level: int = 1,
    max_level: int = 4,
    max_tries: int = 10_000,
) -> CommonPath:
    """Random cell and point outside it joined by a common path."""
    for _ in range(max_tries):
        n = rng.choice(n_choices)
        A = random_cell(rng, n, min_level, max_level)
        b = random_address(rng, n, 4)
        if A.contains(b):
            continue
        try:
            return build_common_path(A, b)
        except NoCommonPath:
            continue
    raise RuntimeError("no configuration found")
