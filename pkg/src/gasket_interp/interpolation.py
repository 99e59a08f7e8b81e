"""Geodesic interpolants between points and between cells.

For two disjoint cells ``A = <v>`` (level k) and ``B = <w>`` (level m) joined
by a common path from a corner ``a_dot`` of A to a corner ``b_dot`` of B,
every pair ``a in A, b in B`` has a geodesic of the form
``a -> a_dot -> (gamma) -> b_dot -> b``.  Inside the regular window
``[t1f, t2i]`` the interpolant ``Z_t(a, b)`` lies on ``gamma`` and is
described by the linear parametrisation ``H_t`` composed with ``psi_t``.

``B`` may also be a single point, in which case ``2**-m`` is replaced by 0
throughout (``t2i = 1``, ``psi_t(s, r) = s``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Union

from .core import (
    BaryCoord,
    Cell,
    PointAddress,
    as_bary,
    bary_to_address,
    canonicalize,
    format_fraction,
    phi_projection,
)
from .errors import NoCommonPath, OutsideWindow, SamePoint
from . import metric

Target = Union[Cell, PointAddress]


def _frac(t) -> Fraction:
    return t if isinstance(t, Fraction) else Fraction(t)


# -- pointwise interpolants ------------------------------------------------------------

def interpolate_points(a: PointAddress, b: PointAddress, t) -> list[PointAddress]:
    """The set of points at fraction ``t`` along some geodesic from ``a`` to ``b``.

    One point per geodesic, deduplicated and sorted by address text.
    ``t`` must be dyadic so that the points have finite addresses.
    """
    t = _frac(t)
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    if metric.same_point(a, b):
        raise SamePoint(f"{a} and {b} are the same point")
    out = {metric.point_along(g, t) for g in metric.enumerate_geodesics(a, b)}
    return sorted(out, key=str)


def psi(t, k: int, m: int | None, s, r) -> Fraction:
    """``(alpha s + beta (1 - r)) / (alpha + beta)`` with ``alpha = 2^-k (1-t)``, ``beta = 2^-m t``.

    ``m=None`` stands for a point target (``beta = 0``).
    """
    t, s, r = _frac(t), _frac(s), _frac(r)
    alpha = Fraction(1, 1 << k) * (1 - t)
    beta = Fraction(0) if m is None else Fraction(1, 1 << m) * t
    if alpha + beta == 0:
        raise ValueError("psi is undefined when both weights vanish")
    return (alpha * s + beta * (1 - r)) / (alpha + beta)


# -- common paths --------------------------------------------------------------------

@dataclass(frozen=True)
class CommonPath:
    A: Cell
    B: Target
    entry: PointAddress  # a_dot, a corner of A
    exit: PointAddress  # b_dot, a corner of B (or B itself)
    entry_index: int
    exit_index: int | None
    gamma: metric.Geodesic
    D: Fraction

    @property
    def n(self) -> int:
        return self.A.n

    @property
    def k(self) -> int:
        return self.A.level

    @property
    def m(self) -> int | None:
        return self.B.level if isinstance(self.B, Cell) else None

    @property
    def side_a(self) -> Fraction:
        return self.A.side

    @property
    def side_b(self) -> Fraction:
        return self.B.side if isinstance(self.B, Cell) else Fraction(0)

    @property
    def t1f(self) -> Fraction:
        # last moment at which some geodesic is still inside A: start at the
        # far side of A and end right at b_dot
        return self.side_a / (self.side_a + self.D)

    @property
    def t2i(self) -> Fraction:
        # first moment at which some geodesic leaves gamma: start at a_dot and
        # end at the far side of B
        return self.D / (self.D + self.side_b)

    @property
    def regular(self) -> bool:
        return self.t1f < self.t2i

    def in_window(self, t) -> bool:
        return self.t1f <= _frac(t) <= self.t2i

    def to_dict(self) -> dict:
        return {
            "A": str(self.A),
            "B": str(self.B),
            "entry": str(self.entry),
            "exit": str(self.exit),
            "D": format_fraction(self.D),
            "t1f": format_fraction(self.t1f),
            "t2i": format_fraction(self.t2i),
            "regular": self.regular,
            "gamma": [str(p) for p in self.gamma.nodes],
        }


@lru_cache(maxsize=4096)
def _sweep(cell: Cell) -> tuple[PointAddress, ...]:
    """Corners of the cell and of its children."""
    pts = []
    for c in (cell, *(cell.child(i) for i in range(cell.n + 1))):
        for p in c.boundary_points():
            if p not in pts:
                pts.append(p)
    return tuple(pts)


def _corner_gap(cell: Cell, i: int, p: PointAddress) -> Fraction:
    return metric.boundary_distance(cell, i, p)


def _validate(A: Cell, B: Target, i: int, j: int | None, D: Fraction) -> bool:
    """Check ``d(a, b) = d(a, a_dot) + D + d(b_dot, b)`` over the sweep points.

    This says some geodesic from ``a`` to ``b`` runs through ``a_dot`` and
    ``b_dot``, which is what a common path asks for; other geodesics of the
    same length may avoid it.
    """
    gap_b = (lambda y: _corner_gap(B, j, y)) if j is not None else (lambda y: Fraction(0))
    # corners alone reject most pairs cheaply; the sweep comes second
    corners_b = B.boundary_points() if isinstance(B, Cell) else [B]
    for xs, ys in ((A.boundary_points(), corners_b), (_sweep(A), _sweep(B) if isinstance(B, Cell) else [B])):
        gys = [gap_b(y) for y in ys]
        for x in xs:
            gx = _corner_gap(A, i, x)
            if any(metric.distance(x, y) != gx + D + gy for y, gy in zip(ys, gys)):
                return False
    return True


def common_path_candidates(A: Cell, B: Target) -> list[CommonPath]:
    """Every corner pair whose unique geodesic is a common path from A to B."""
    if isinstance(B, Cell):
        if A.n != B.n:
            raise ValueError("cells live in different gaskets")
        if A.word[: B.level] == B.word[: A.level]:
            raise NoCommonPath(f"cells {A} and {B} are nested or equal")
        exits = list(enumerate(B.boundary_points()))
    else:
        if A.contains(B):
            raise NoCommonPath(f"{B} lies in {A}")
        exits = [(None, canonicalize(B))]
    pairs = []
    for i, pa in enumerate(A.boundary_points()):
        for j, pb in exits:
            if metric.same_point(pa, pb):
                continue
            pairs.append((metric.distance(pa, pb), i, j, pa, pb))
    if not pairs:
        raise NoCommonPath("the cells touch at every corner pair")
    out = []
    for D, i, j, pa, pb in sorted(pairs, key=lambda p: (p[0], p[1], -1 if p[2] is None else p[2])):
        if not _validate(A, B, i, j, D) or metric.count_geodesics(pa, pb) != 1:
            continue
        (g,) = metric.enumerate_geodesics(pa, pb)
        out.append(CommonPath(A, B, pa, pb, i, j, g, D))
    return out


def build_common_path(A: Cell, B: Target) -> CommonPath:
    """The unique common path between corners of A and B.

    Raises NoCommonPath when the cells touch, when no corner pair works, or
    when several corner pairs qualify.
    """
    if isinstance(B, Cell) and A.n == B.n:
        for p in A.boundary_points():
            if B.contains(p):
                raise NoCommonPath(f"cells {A} and {B} share the vertex {p}")
    cands = common_path_candidates(A, B)
    if not cands:
        raise NoCommonPath(f"no common path between {A} and {B}")
    if len(cands) > 1:
        raise NoCommonPath(f"{len(cands)} corner pairs give common paths; refusing to choose")
    return cands[0]


# -- the interval Z_t(A, B) ---------------------------------------------------------

def gamma_point(cp: CommonPath, s: Fraction) -> BaryCoord:
    """Point of gamma at arclength ``s`` from the entry point."""
    if cp.D == 0:
        return as_bary(cp.entry)
    return metric.point_along_bary(cp.gamma, Fraction(s) / cp.D)


def _bary_or_address(p: BaryCoord):
    return bary_to_address(p)[0] if p.is_dyadic() else p


@dataclass(frozen=True)
class InterpolantInterval:
    t: Fraction
    start: Fraction  # arclength of x1 from the entry point along gamma
    length: Fraction
    x1: BaryCoord
    x2: BaryCoord

    @property
    def end(self) -> Fraction:
        return self.start + self.length

    def to_dict(self) -> dict:
        return {
            "t": format_fraction(self.t),
            "x1": str(_bary_or_address(self.x1)),
            "x2": str(_bary_or_address(self.x2)),
            "start": format_fraction(self.start),
            "length": format_fraction(self.length),
        }


def _check_window(cp: CommonPath, t: Fraction) -> None:
    if not cp.in_window(t):
        raise OutsideWindow(
            f"t={t} is outside the regular window [{cp.t1f}, {cp.t2i}]"
        )


def interpolant_interval(cp: CommonPath, t) -> InterpolantInterval:
    t = _frac(t)
    _check_window(cp, t)
    start = t * (cp.side_a + cp.D) - cp.side_a
    length = cp.side_a * (1 - t) + cp.side_b * t
    return InterpolantInterval(t, start, length, gamma_point(cp, start), gamma_point(cp, start + length))


def H(cp: CommonPath, t, q) -> BaryCoord:
    """Increasing linear parametrisation of ``Z_t(A, B)`` by ``q in [0, 1]``."""
    q = _frac(q)
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    iv = interpolant_interval(cp, t)
    return gamma_point(cp, iv.start + q * iv.length)


def Z(cp: CommonPath, a: PointAddress, b: PointAddress | None, t) -> BaryCoord:
    """``Z_t(a, b) = H_t(psi_t(phi_a(a), phi_b(b)))`` for ``a in A`` and ``b in B``."""
    t = _frac(t)
    s = phi_projection(cp.A, cp.entry_index, a)
    if cp.m is None:
        r = Fraction(0)
    else:
        r = phi_projection(cp.B, cp.exit_index, b)
    return H(cp, t, psi(t, cp.k, cp.m, s, r))


def largest_admissible_subcells(cp: CommonPath, t) -> tuple[Cell, Target]:
    """Largest subcells ``A' <= A`` and ``B' <= B`` at the common path ends with t in their window.

    ``A'`` is ``<v i ... i>`` where ``a_dot = <v i-bar>``, so it keeps the
    same entry point; ``t1f`` only depends on the A side and ``t2i`` only on
    the B side, so the two shrink independently.
    """
    t = _frac(t)
    if not 0 < t < 1 and not (t == 1 and cp.m is None):
        raise OutsideWindow("t must lie strictly inside (0, 1)")
    A, B = cp.A, cp.B
    side = cp.side_a
    while side / (side + cp.D) > t:
        A = A.child(cp.entry_index)
        side /= 2
    if isinstance(B, Cell):
        side = cp.side_b
        while cp.D / (cp.D + side) < t:
            B = B.child(cp.exit_index)
            side /= 2
    return A, B
