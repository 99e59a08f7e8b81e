"""Exact symbolic and barycentric arithmetic on the Sierpinski n-gasket.

Points are eventually-constant addresses ``w1 w2 ... wk t t t ...`` written
``[w1 w2 ... wk | t]``.  Vertices of the gasket have exactly two such
addresses; :func:`canonicalize` picks one of them deterministically.
Barycentric coordinates are exact dyadic rationals held as
:class:`fractions.Fraction` instances with a power-of-two denominator.
"""

from __future__ import annotations

import re
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotInCell, NotOnGasket, SamePoint

Word = tuple  # tuple[int, ...]

HALF = Fraction(1, 2)


# -- dyadic helpers -------------------------------------------------------------

def dyadic(numerator: int, exponent: int) -> Fraction:
    """Return ``numerator / 2**exponent`` in reduced form."""
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    return Fraction(numerator, 1 << exponent)


def is_dyadic(x: Fraction) -> bool:
    x = Fraction(x)
    d = x.denominator
    return d & (d - 1) == 0


def dyadic_exponent(x: Fraction) -> int:
    """Exponent ``m`` of the reduced form ``k / 2**m``."""
    x = Fraction(x)
    if not is_dyadic(x):
        raise ValueError(f"{x} is not a dyadic rational")
    return x.denominator.bit_length() - 1


def format_fraction(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


# -- addresses -----------------------------------------------------------------

_ADDR_RE = re.compile(r"^\s*\[?\s*([0-9\s,]*?)\s*\|\s*([0-9]+)\s*\]?\s*$")


def _check_letters(letters: Iterable[int], n: int) -> None:
    if letters and (min(letters) < 0 or max(letters) > n):
        bad = [a for a in letters if not 0 <= a <= n]
        raise ValueError(f"letter {bad[0]} out of range for n={n}")


@dataclass(frozen=True)
class PointAddress:
    """Eventually constant address ``word`` followed by ``tail`` repeated."""

    word: Word
    tail: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("gasket dimension must be at least 1")
        if type(self.word) is not tuple:
            object.__setattr__(self, "word", tuple(int(a) for a in self.word))
        _check_letters(self.word + (self.tail,), self.n)

    @classmethod
    def parse(cls, text: str, n: int) -> "PointAddress":
        m = _ADDR_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse address {text!r}; expected '[w1 w2 ... | t]'")
        body = m.group(1).replace(",", " ").split()
        return cls(tuple(int(a) for a in body), int(m.group(2)), n)

    def letter(self, i: int) -> int:
        """The ``i``-th letter (0-based) of the infinite address."""
        return self.word[i] if i < len(self.word) else self.tail

    def __str__(self) -> str:
        return "[" + " ".join(map(str, self.word)) + ("" if not self.word else " ") + "| " + str(self.tail) + "]"


def _strip(word: Word, tail: int) -> Word:
    end = len(word)
    while end and word[end - 1] == tail:
        end -= 1
    return word[:end]


def _dual_raw(word: Word, tail: int) -> tuple[Word, int] | None:
    if not word:
        return None
    return word[:-1] + (tail,), word[-1]


@lru_cache(maxsize=1 << 16)
def canonicalize(p: PointAddress) -> PointAddress:
    word = _strip(p.word, p.tail)
    if word and word[-1] > p.tail:
        word, tail = _dual_raw(word, p.tail)
        return PointAddress(word, tail, p.n)
    return PointAddress(word, p.tail, p.n)


def dual_address(p: PointAddress) -> PointAddress | None:
    """The other address of a vertex, or ``None`` for non-vertices and corners."""
    word = _strip(p.word, p.tail)
    dual = _dual_raw(word, p.tail)
    if dual is None:
        return None
    return PointAddress(dual[0], dual[1], p.n)


@lru_cache(maxsize=1 << 16)
def all_addresses(p: PointAddress) -> tuple[PointAddress, ...]:
    """Canonical address first, then its dual if the point is a vertex."""
    c = canonicalize(p)
    d = dual_address(c)
    return (c,) if d is None else (c, d)


def same_point(x: PointAddress, y: PointAddress) -> bool:
    return x.n == y.n and canonicalize(x) == canonicalize(y)


# -- barycentric coordinates ---------------------------------------------------------

@dataclass(frozen=True)
class BaryCoord:
    coords: tuple

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coords)
        object.__setattr__(self, "coords", cs)
        if sum(cs) != 1:
            raise NotOnGasket(f"barycentric coordinates {cs} do not sum to 1")
        if any(c < 0 for c in cs):
            raise NotOnGasket(f"negative barycentric coordinate in {cs}")

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    def __getitem__(self, i: int) -> Fraction:
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def is_dyadic(self) -> bool:
        return all(is_dyadic(c) for c in self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(format_fraction(c) for c in self.coords) + ")"


def corner(i: int, n: int) -> BaryCoord:
    return BaryCoord(tuple(Fraction(int(k == i)) for k in range(n + 1)))


def bary_ints(word: Sequence[int], tail: int, n: int) -> tuple[list[int], int]:
    """Integer numerators over the common denominator ``2**len(word)``."""
    e = len(word)
    nums = [0] * (n + 1)
    for j, a in enumerate(word, start=1):
        nums[a] += 1 << (e - j)
    nums[tail] += 1
    return nums, e


def address_to_bary(p: PointAddress) -> BaryCoord:
    nums, e = bary_ints(p.word, p.tail, p.n)
    den = 1 << e
    return BaryCoord(tuple(Fraction(v, den) for v in nums))


def _common_scale(c: Sequence[Fraction]) -> tuple[list[int], int]:
    cs = [Fraction(v) for v in c]
    if not all(is_dyadic(v) for v in cs):
        raise NotOnGasket(f"coordinates {tuple(cs)} are not dyadic")
    e = max(dyadic_exponent(v) for v in cs)
    den = 1 << e
    return [v.numerator * (den // v.denominator) for v in cs], e


def bary_to_address(c: BaryCoord | Sequence[Fraction]) -> tuple[PointAddress, ...]:
    """All addresses of the point with barycentric coordinates ``c``.

    Digits are extracted greedily: at each binary place the point must lie in
    a maximal subcell ``i`` (coordinate ``>= 1/2``).  Two candidates can only
    occur at a vertex, where both coordinates are exactly ``1/2``; both
    branches are followed, recovering the two binary expansions.
    """
    if not isinstance(c, BaryCoord):
        c = BaryCoord(tuple(c))
    n = c.n
    nums, e = _common_scale(c.coords)
    den = 1 << e
    found: list[PointAddress] = []
    stack = [((), nums)]
    while stack:
        prefix, cur = stack.pop()
        if len(prefix) > e + 1:
            continue
        done = [i for i, v in enumerate(cur) if v == den]
        if done:
            found.append(PointAddress(prefix, done[0], n))
            continue
        for i, v in enumerate(cur):
            if 2 * v >= den:
                nxt = [2 * u for u in cur]
                nxt[i] -= den
                stack.append((prefix + (i,), nxt))
    if not found:
        raise NotOnGasket(f"{c} has no address satisfying the digit condition")
    canon = []
    for p in found:
        cp = canonicalize(p)
        if cp not in canon:
            canon.append(cp)
    canon.sort(key=lambda a: (len(a.word), a.word, a.tail))
    first = canon[0]
    dual = dual_address(first)
    return (first,) if dual is None else (first, dual)


def to_address(c: BaryCoord | PointAddress) -> PointAddress:
    if isinstance(c, PointAddress):
        return canonicalize(c)
    return bary_to_address(c)[0]


def as_bary(p: BaryCoord | PointAddress) -> BaryCoord:
    return p if isinstance(p, BaryCoord) else address_to_bary(p)


# -- cells -------------------------------------------------------------------

@dataclass(frozen=True)
class Cell:
    word: Word
    n: int

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(a) for a in self.word))
        _check_letters(self.word, self.n)

    @classmethod
    def parse(cls, text: str, n: int) -> "Cell":
        body = text.strip().strip("[]").replace(",", " ").split()
        return cls(tuple(int(a) for a in body), n)

    @property
    def level(self) -> int:
        return len(self.word)

    @property
    def side(self) -> Fraction:
        return Fraction(1, 1 << len(self.word))

    def measure(self, weights: Sequence[Fraction] | None = None) -> Fraction:
        """Self-similar measure of the cell; standard weights by default."""
        if weights is None:
            return Fraction(1, (self.n + 1) ** len(self.word))
        out = Fraction(1)
        for a in self.word:
            out *= Fraction(weights[a])
        return out

    def boundary_point(self, i: int) -> PointAddress:
        return canonicalize(PointAddress(self.word, i, self.n))

    def boundary_points(self) -> tuple[PointAddress, ...]:
        return tuple(self.boundary_point(i) for i in range(self.n + 1))

    def child(self, i: int) -> "Cell":
        return Cell(self.word + (i,), self.n)

    def contains(self, p: PointAddress | BaryCoord) -> bool:
        try:
            inverse_map(self.word, p)
        except NotInCell:
            return False
        return True

    def __str__(self) -> str:
        return "[" + " ".join(map(str, self.word)) + "]"


def _check_dims(x: PointAddress, y: PointAddress) -> None:
    if x.n != y.n:
        raise DimensionMismatch(f"points live in S_{x.n} and S_{y.n}")


def _lcp(x: PointAddress, y: PointAddress) -> int | None:
    """Length of the common prefix of two infinite addresses; None if equal."""
    bound = max(len(x.word), len(y.word))
    for i in range(bound):
        if x.letter(i) != y.letter(i):
            return i
    if x.tail == y.tail:
        return None
    return bound


def common_cell(x: PointAddress, y: PointAddress) -> Cell:
    _check_dims(x, y)
    best = -1
    best_word: Word = ()
    for ax in all_addresses(x):
        for ay in all_addresses(y):
            k = _lcp(ax, ay)
            if k is None:
                raise SamePoint(f"{x} and {y} are the same point")
            if k > best:
                best = k
                best_word = tuple(ax.letter(i) for i in range(k))
    return Cell(best_word, x.n)


# -- contraction maps ----------------------------------------------------------------

def apply_map(w: Sequence[int], p):
    """Image of ``p`` under ``F_w = F_{w1} o ... o F_{wk}``."""
    w = tuple(w)
    if isinstance(p, PointAddress):
        _check_letters(w, p.n)
        return canonicalize(PointAddress(w + p.word, p.tail, p.n))
    cs = list(as_bary(p).coords)
    for a in reversed(w):
        cs = [(c + (1 if k == a else 0)) / 2 for k, c in enumerate(cs)]
    return BaryCoord(tuple(cs))


@lru_cache(maxsize=1 << 16)
def relative_addresses(w: Sequence[int], p: PointAddress) -> tuple[PointAddress, ...]:
    """Addresses of ``F_w^{-1}(p)``, one per address of ``p`` lying in ``<w>``."""
    w = tuple(w)
    out = []
    for a in all_addresses(p):
        if all(a.letter(i) == w[i] for i in range(len(w))):
            rel = canonicalize(PointAddress(a.word[len(w):], a.tail, a.n))
            if rel not in out:
                out.append(rel)
    return tuple(out)


def inverse_map(w: Sequence[int], p):
    w = tuple(w)
    if isinstance(p, PointAddress):
        rel = relative_addresses(w, p)
        if not rel:
            raise NotInCell(f"{p} is not in cell {list(w)}")
        return rel[0]
    cs = list(p.coords)
    for a in w:
        cs = [2 * c - (1 if k == a else 0) for k, c in enumerate(cs)]
        if any(c < 0 for c in cs):
            raise NotInCell(f"{p} is not in cell {list(w)}")
    return BaryCoord(tuple(cs))


def phi_projection(cell: Cell, i: int, p: PointAddress | BaryCoord) -> Fraction:
    """Scaled barycentric coordinate ``[F_w^{-1} p]_i`` of ``p`` in ``cell``."""
    q = inverse_map(cell.word, p)
    return as_bary(q)[i]
