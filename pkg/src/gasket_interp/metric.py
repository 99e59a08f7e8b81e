"""Intrinsic distance and geodesics on the Sierpinski n-gasket.

Everything is computed in closed form after rescaling to the common cell of
the two endpoints.  Inside the common cell a geodesic either crosses the
bridge point shared by the two maximal subcells holding the endpoints (kind
``P1``) or crosses two bridge points through a third subcell (kind ``P2``).
Pieces between an endpoint and a bridge point follow the bridge-point descent
along the endpoint's address, and are stored as maximal straight runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .core import (
    BaryCoord,
    Cell,
    PointAddress,
    _check_dims,
    all_addresses,
    apply_map,
    as_bary,
    bary_ints,
    bary_to_address,
    canonicalize,
    common_cell,
    phi_projection,
    relative_addresses,
    same_point,
)
from .errors import NotInCell, NotOnGasket, SamePoint

P1, P2, WITHIN_CELL = "P1", "P2", "within-cell"

_ONE = Fraction(1)
_THREE_HALVES = Fraction(3, 2)


# -- boundary point to interior point -------------------------------------------------

def boundary_distance(cell: Cell, i: int, p: PointAddress | BaryCoord) -> Fraction:
    """Distance from the corner ``<w i-bar>`` of ``cell`` to ``p`` inside it."""
    return cell.side * (1 - phi_projection(cell, i, p))


def _multiplicity(rel: PointAddress, k: int) -> int:
    # rel: canonical address relative to the cell; k: the boundary corner
    if not rel.word:
        return 1
    a, b = rel.word[-1], rel.tail
    return 2 if (a != b and a != k and b != k) else 1


def boundary_multiplicity(cell: Cell, k: int, p: PointAddress) -> int:
    """Number of geodesics (1 or 2) from the corner ``k`` of ``cell`` to ``p``."""
    rel = relative_addresses(cell.word, p)
    if not rel:
        raise NotInCell(f"{p} is not in cell {cell}")
    return _multiplicity(rel[0], k)


# -- polyline helpers ---------------------------------------------------------------

def _pt(word: Sequence[int], tail: int, n: int) -> tuple:
    nums, e = bary_ints(word, tail, n)
    den = 1 << e
    return tuple(Fraction(v, den) for v in nums)


def _same_direction(a: tuple, b: tuple, c: tuple) -> bool:
    d1 = [q - p for p, q in zip(a, b)]
    d2 = [q - p for p, q in zip(b, c)]
    lam = None
    for u, v in zip(d1, d2):
        if u:
            lam = v / u
            break
    if lam is None or lam <= 0:
        return False
    return all(v == lam * u for u, v in zip(d1, d2))


def _simplify(nodes) -> list:
    out: list = []
    for p in nodes:
        if out and out[-1] == p:
            continue
        if len(out) >= 2 and _same_direction(out[-2], out[-1], p):
            out[-1] = p
        else:
            out.append(p)
    return out


def _seg_len(a: tuple, b: tuple) -> Fraction:
    # points on a common simplex edge: Euclidean length is half the l1 gap
    return sum((abs(q - p) for p, q in zip(a, b)), Fraction(0)) / 2


def _descent(form: PointAddress, k: int) -> list:
    """Nodes from the corner ``<f1 k-bar>`` of the subcell ``<f1>`` to ``form``.

    ``form`` is an address of a point of the (rescaled) common cell; the
    sequence ``<f1..fm k-bar>`` walks through bridge points toward it.
    """
    n = form.n
    steps = max(len(form.word), 1)
    nodes = [_pt(tuple(form.letter(i) for i in range(m)), k, n) for m in range(1, steps + 1)]
    nodes.append(_pt(form.word, form.tail, n))
    return _simplify(nodes)


def _descents(rel: PointAddress, first: int, k: int) -> list[list]:
    """Distinct descents from bridge ``<first k-bar>`` to the rescaled point ``rel``."""
    paths = []
    for form in all_addresses(rel):
        if form.letter(0) != first:
            continue
        path = _descent(form, k)
        if path not in paths:
            paths.append(path)
    return paths


# -- distance ----------------------------------------------------------------------

@dataclass(frozen=True)
class _Setup:
    cell: Cell
    x: PointAddress  # rescaled into the common cell
    y: PointAddress
    bx: tuple
    by: tuple
    assignments: tuple  # ((i, j), ...) maximal subcells holding x and y


def _setup(x: PointAddress, y: PointAddress) -> _Setup:
    cell = common_cell(x, y)
    rx = relative_addresses(cell.word, x)[0]
    ry = relative_addresses(cell.word, y)[0]
    ix = sorted({f.letter(0) for f in all_addresses(rx)})
    iy = sorted({f.letter(0) for f in all_addresses(ry)})
    pairs = tuple((i, j) for i in ix for j in iy if i != j)
    return _Setup(cell, rx, ry, _pt(rx.word, rx.tail, rx.n), _pt(ry.word, ry.tail, ry.n), pairs)


def _candidates(s: _Setup):
    """Yield ``(value, kind, i, j, k)`` for every P1/P2 candidate length."""
    n = s.cell.n
    bx, by = s.bx, s.by
    for i, j in s.assignments:
        yield _ONE - bx[j] - by[i], P1, i, j, None
        for k in range(n + 1):
            if k != i and k != j:
                yield _THREE_HALVES - bx[k] - by[k], P2, i, j, k


def _as_address(p) -> PointAddress:
    if isinstance(p, PointAddress):
        return p
    return bary_to_address(p)[0]


def distance(x: PointAddress | BaryCoord, y: PointAddress | BaryCoord) -> Fraction:
    x, y = _as_address(x), _as_address(y)
    _check_dims(x, y)
    if same_point(x, y):
        return Fraction(0)
    s = _setup(x, y)
    return s.cell.side * min(c[0] for c in _candidates(s))


# -- geodesics -------------------------------------------------------------------------

class Geodesic:
    """A geodesic stored as a polyline of maximal straight runs.

    Two geodesics are equal when their node sequences agree.
    """

    __slots__ = ("start", "end", "nodes", "length", "kind")

    def __init__(self, start: PointAddress, end: PointAddress, nodes, length: Fraction, kind: str):
        self.start = start
        self.end = end
        self.nodes = tuple(BaryCoord(p) if not isinstance(p, BaryCoord) else p for p in nodes)
        self.length = length
        self.kind = kind

    def __eq__(self, other):
        return isinstance(other, Geodesic) and self.nodes == other.nodes

    def __hash__(self):
        return hash(self.nodes)

    def __repr__(self):
        return f"Geodesic({self.kind}, length={self.length}, anchors={[str(a) for a in self.anchors]})"

    @property
    def endpoints(self) -> tuple[PointAddress, PointAddress]:
        return self.start, self.end

    @property
    def anchors(self) -> tuple[PointAddress, ...]:
        """Interior turning points as canonical addresses."""
        return tuple(bary_to_address(p)[0] for p in self.nodes[1:-1])

    def segment_lengths(self) -> list[Fraction]:
        return [_seg_len(a.coords, b.coords) for a, b in zip(self.nodes, self.nodes[1:])]

    def to_dict(self) -> dict:
        from .core import format_fraction

        return {
            "endpoints": [str(canonicalize(self.start)), str(canonicalize(self.end))],
            "anchors": [str(a) for a in self.anchors],
            "length": format_fraction(self.length),
            "kind": self.kind,
        }


def _pairs_for(s: _Setup):
    best = min(c[0] for c in _candidates(s))
    return best, [c for c in _candidates(s) if c[0] == best]


def count_geodesics(x: PointAddress, y: PointAddress) -> int:
    """Number of distinct geodesics between two distinct points."""
    x, y = _as_address(x), _as_address(y)
    _check_dims(x, y)
    if same_point(x, y):
        raise SamePoint(f"{x} and {y} are the same point")
    return _count(canonicalize(x), canonicalize(y))


@lru_cache(maxsize=65536)
def _count(x: PointAddress, y: PointAddress) -> int:
    s = _setup(x, y)
    if len(s.assignments) > 1:
        # an endpoint is a bridge point of the common cell; paths found under
        # different assignments can coincide, so count distinct ones
        return len(enumerate_geodesics(x, y))
    _, winners = _pairs_for(s)
    (i, j), = s.assignments
    relx = _within(s.x, i)
    rely = _within(s.y, j)
    total = 0
    for _, kind, _, _, k in winners:
        if kind == P1:
            total += _multiplicity(relx, j) * _multiplicity(rely, i)
        else:
            total += _multiplicity(relx, k) * _multiplicity(rely, k)
    return total


def _within(rel: PointAddress, i: int) -> PointAddress:
    """Address of the rescaled point relative to its maximal subcell ``<i>``."""
    return relative_addresses((i,), rel)[0]


def enumerate_geodesics(x: PointAddress, y: PointAddress) -> list[Geodesic]:
    x, y = _as_address(x), _as_address(y)
    _check_dims(x, y)
    if same_point(x, y):
        raise SamePoint(f"{x} and {y} are the same point")
    s = _setup(x, y)
    best, winners = _pairs_for(s)
    corners = set(s.cell.boundary_points())
    kind_override = WITHIN_CELL if (canonicalize(x) in corners and canonicalize(y) in corners) else None
    w = s.cell.word
    out: list[Geodesic] = []
    seen = set()
    for _, kind, i, j, k in winners:
        via = j if kind == P1 else k
        via_y = i if kind == P1 else k
        for px in _descents(s.x, i, via):
            for py in _descents(s.y, j, via_y):
                nodes = _simplify(list(reversed(px)) + py)
                nodes = tuple(apply_map(w, BaryCoord(p)) for p in nodes)
                if nodes in seen:
                    continue
                seen.add(nodes)
                out.append(Geodesic(x, y, nodes, best * s.cell.side, kind_override or kind))
    return out


def point_along_bary(g: Geodesic, t: Fraction) -> BaryCoord:
    """Point at arclength ``t * |g|`` from the start of ``g`` (any rational ``t``)."""
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError("t must lie in [0, 1]")
    target = t * g.length
    walked = Fraction(0)
    nodes = g.nodes
    for a, b, seg in zip(nodes, nodes[1:], g.segment_lengths()):
        if walked + seg >= target:
            lam = (target - walked) / seg
            return BaryCoord(tuple(p + lam * (q - p) for p, q in zip(a, b)))
        walked += seg
    return nodes[-1]


def point_along(g: Geodesic, t: Fraction) -> PointAddress:
    """Same as :func:`point_along_bary` but as an address; needs a dyadic result."""
    if Fraction(t) == 0:
        return canonicalize(g.start)
    if Fraction(t) == 1:
        return canonicalize(g.end)
    p = point_along_bary(g, t)
    if not p.is_dyadic():
        raise NotOnGasket(f"point at t={t} is not dyadic; use point_along_bary")
    return bary_to_address(p)[0]


def on_polyline(g: Geodesic, p: BaryCoord | PointAddress) -> Fraction | None:
    """Arclength of ``p`` along ``g``, or None if ``p`` is not on it."""
    c = as_bary(p).coords
    walked = Fraction(0)
    for a, b, seg in zip(g.nodes, g.nodes[1:], g.segment_lengths()):
        a, b = a.coords, b.coords
        d = [q - r for r, q in zip(a, b)]
        e = [q - r for r, q in zip(a, c)]
        lam = None
        for u, v in zip(d, e):
            if u:
                lam = v / u
                break
        if lam is not None and 0 <= lam <= 1 and all(v == lam * u for u, v in zip(d, e)):
            return walked + lam * seg
        walked += seg
    if len(g.nodes) == 1 and g.nodes[0].coords == c:
        return Fraction(0)
    return None
