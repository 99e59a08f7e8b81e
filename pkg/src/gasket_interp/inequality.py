"""Numerical checks of the interpolation inequality on S_n.

``Phi_n(x) = (1 - (1 - x)^d_n)^(1/d_n)`` with ``d_n = log 2 / log((n+1)/n)``
bounds the distribution function of ``nu_n``; the inequality compares
``1 - (1 - H1(Z_t(A, B)))^d_n`` with ``(1-t) mu(A)^s + t mu(B)^s`` where
``s = log 2 / log(n+1)``.

Transcendental quantities are doubles and every comparison allows a guard
band of ``GUARD``; measures, CDF values and interval lengths are exact.
"""

from __future__ import annotations

import io
import itertools
import json
import math
import random
from collections import deque
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import Cell, as_bary, format_fraction, phi_projection
from .errors import DomainError, NoCommonPath, NotConnected
from .interpolation import build_common_path, common_path_candidates
from .measures import SelfSimilarMeasure1D, nu_histogram

GUARD = 1e-12
CSV_VERSION = "gasket-interp-gineq/1"


def d_n(n: int) -> float:
    if n < 1:
        raise DomainError("n must be at least 1")
    return math.log(2) / math.log1p(1 / n)


def measure_exponent(n: int) -> float:
    """``log 2 / log(n+1)``, the exponent turning cell measure into side length."""
    return math.log(2) / math.log(n + 1)


def phi_power(n: int, x) -> float:
    """``Phi_n(x)^d_n = 1 - (1 - x)^d_n``."""
    x = _unit(x)
    if x == 1.0:
        return 1.0
    return -math.expm1(d_n(n) * math.log1p(-x))


def phi(n: int, x) -> float:
    p = phi_power(n, x)
    if p <= 0.0:
        return 0.0
    return p ** (1 / d_n(n))


def _unit(x) -> float:
    xf = float(x)
    if not 0.0 <= xf <= 1.0:  # also rejects NaN
        raise DomainError(f"x={x} is outside [0, 1]")
    return xf


# -- bounds on Phi_n and the distribution function ---------------------------------------

@dataclass
class PhiLemmaReport:
    n: int
    grid_size: int
    max_violation_lower: float  # max of n Phi(2x) - (n+1) Phi(x) on [0, 1/2]
    max_violation_upper: float  # max of Phi(2x-1) - (n+1) Phi(x) + n on [1/2, 1]
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {**asdict(self), "ok": self.ok}


def check_phi_lemma(n: int, grid_size: int = 10_000) -> PhiLemmaReport:
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    lower = upper = -math.inf
    bad = 0
    for i in range(grid_size):
        x = i / (grid_size - 1)
        px = phi(n, x)
        if x <= 0.5:
            v = n * phi(n, 2 * x) - (n + 1) * px
            lower = max(lower, v)
            bad += v > GUARD
        if x >= 0.5:
            v = phi(n, 2 * x - 1) - (n + 1) * px + n
            upper = max(upper, v)
            bad += v > GUARD
    return PhiLemmaReport(n, grid_size, lower, upper, bad)


def concavity_defect(n: int, grid_size: int = 1000) -> float:
    """Largest second difference of ``Phi_n^d_n`` on a uniform grid (<= 0 if concave)."""
    ys = [phi_power(n, i / (grid_size - 1)) for i in range(grid_size)]
    return max(ys[i - 1] - 2 * ys[i] + ys[i + 1] for i in range(1, grid_size - 1))


@dataclass
class GIneqReport:
    n: int
    depth: int
    min_slack: float
    argmin: str  # the dyadic x attaining min slack, as a fraction
    violations: int
    rows: list = field(default_factory=list, repr=False)  # (x, cdf, phi)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "depth": self.depth,
            "min_slack": self.min_slack,
            "argmin": self.argmin,
            "violations": self.violations,
            "ok": self.ok,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {CSV_VERSION} " + json.dumps(self.to_dict(), sort_keys=True) + "\n")
        buf.write("x,cdf,phi\n")
        for x, c, p in self.rows:
            buf.write(f"{float(x)!r},{float(c)!r},{p!r}\n")
        return buf.getvalue()


def check_gineq(n: int, depth: int = 12) -> GIneqReport:
    """Compare the exact ``nu_n([0, x])`` with ``Phi_n(x)`` at every ``x = k 2^-depth``.

    The minimum slack is taken over interior points; at ``x = 0`` and ``x = 1``
    both sides are equal.
    """
    hist = nu_histogram(SelfSimilarMeasure1D.standard(n), depth, exact=True)
    cdf = [Fraction(0)] + hist.cumulative()
    den = 1 << depth
    rows = []
    bad = 0
    best, arg = math.inf, "0"
    for k, c in enumerate(cdf):
        x = Fraction(k, den)
        p = phi(n, x)
        slack = p - float(c)
        rows.append((x, c, p))
        if slack < -GUARD:
            bad += 1
        if 0 < k < den and slack < best:
            best, arg = slack, format_fraction(x)
    return GIneqReport(n, depth, best, arg, bad, rows)


# -- cell inequality -------------------------------------------------------------------

@dataclass
class InequalityReport:
    t: str
    h1: Fraction  # exact interval length used on the left side
    lhs: float
    rhs: float
    in_window: bool
    details: dict = field(default_factory=dict)

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs

    @property
    def ok(self) -> bool:
        return self.slack >= -GUARD

    @property
    def sharp(self) -> bool:
        return self.in_window and abs(self.slack) <= GUARD

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "h1": format_fraction(self.h1),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "ok": self.ok,
            "sharp": self.sharp,
            "in_window": self.in_window,
            **self.details,
        }


def _rhs(n: int, t: Fraction, mu_a: Fraction, mu_b: Fraction) -> float:
    s = measure_exponent(n)
    tf = float(t)
    return (1 - tf) * float(mu_a) ** s + tf * float(mu_b) ** s


def _check_t(t) -> Fraction:
    t = Fraction(t)
    if not 0 < t < 1:
        raise DomainError("t must lie in (0, 1)")
    return t


def check_cell_inequality(A: Cell, B: Cell, t) -> InequalityReport:
    """``H1(Z_t(A, B)) >= (1-t) mu(A)^s + t mu(B)^s`` for two cells.

    The left side is the length of the interval swept along the common path,
    which is the exact value of ``H1(Z_t)`` inside the regular window and a
    lower bound outside it.
    """
    t = _check_t(t)
    cp = build_common_path(A, B)
    h1 = cp.side_a * (1 - t) + cp.side_b * t
    return InequalityReport(
        format_fraction(t),
        h1,
        float(h1),
        _rhs(A.n, t, A.measure(), B.measure()),
        cp.in_window(t),
        {"A": str(A), "B": str(B), "t1f": format_fraction(cp.t1f), "t2i": format_fraction(cp.t2i)},
    )


# -- unions of cells ------------------------------------------------------------------

def _corners(cell: Cell) -> set:
    return {as_bary(p).coords for p in cell.boundary_points()}


def check_connected(cells: Sequence[Cell]) -> None:
    """Raise NotConnected unless the cells form one component under shared corners."""
    cells = list(cells)
    if not cells:
        raise NotConnected("empty union")
    corners = [_corners(c) for c in cells]
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in range(len(cells)):
            if v not in seen and corners[u] & corners[v]:
                seen.add(v)
                queue.append(v)
    if len(seen) != len(cells):
        raise NotConnected(f"{len(cells) - len(seen)} of {len(cells)} cells are cut off")


def minimal_cell(cells: Sequence[Cell]) -> Cell:
    words = [c.word for c in cells]
    k = 0
    while all(len(w) > k for w in words) and len({w[k] for w in words}) == 1:
        k += 1
    return Cell(words[0][:k], cells[0].n)


def phi_interval(outer: Cell, i: int, cells: Sequence[Cell]) -> tuple[Fraction, Fraction]:
    """Range of ``phi`` for corner ``i`` of ``outer`` over the union of ``cells``."""
    vals = [phi_projection(outer, i, p) for c in cells for p in c.boundary_points()]
    return min(vals), max(vals)


def _normalize_union(cells: Sequence[Cell]) -> list[Cell]:
    cells = sorted(set(cells), key=lambda c: c.word)
    if not cells:
        raise NotConnected("empty union")
    if len({c.level for c in cells}) != 1 or len({c.n for c in cells}) != 1:
        raise ValueError("a union must consist of cells of one level in one gasket")
    check_connected(cells)
    return cells


@dataclass
class MainReport:
    reports: list  # one InequalityReport per common path

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    @property
    def relative_ok(self) -> bool:
        return all(r.details["relative_ok"] for r in self.reports)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "relative_ok": self.relative_ok, "paths": [r.to_dict() for r in self.reports]}


def check_main_inequality(A: Sequence[Cell], B: Sequence[Cell], t) -> MainReport:
    """``1 - (1 - H1(Z_t))^d_n >= (1-t) mu(A)^s + t mu(B)^s`` for connected unions.

    ``H1(Z_t)`` is bounded below by ``(1-t) 2^-|v| |phi_a(A)| + t 2^-|w| |phi_b(B)|``
    with ``<v>``, ``<w>`` the minimal cells; every corner pair of those cells
    that carries a common path is checked and reported separately.

    Each path report also carries ``relative_rhs``, the weaker right side
    ``(1-t) 2^-|v| (mu(A)/mu(V))^d_n + t 2^-|w| (mu(B)/mu(W))^d_n``.  The
    step from it to the stated right side needs ``mu(V)^(s - d_n) >= mu(A)^(s - d_n)``,
    which fails because ``s < d_n``; ``ok`` may then be False while
    ``relative_ok`` holds.
    """
    t = _check_t(t)
    A, B = _normalize_union(A), _normalize_union(B)
    n = A[0].n
    V, W = minimal_cell(A), minimal_cell(B)
    for p in V.boundary_points():
        if W.contains(p):
            raise NoCommonPath(f"minimal cells {V} and {W} touch")
    cands = common_path_candidates(V, W)
    if not cands:
        raise NoCommonPath(f"no common path between {V} and {W}")
    mu_a = sum((c.measure() for c in A), Fraction(0))
    mu_b = sum((c.measure() for c in B), Fraction(0))
    rhs = _rhs(n, t, mu_a, mu_b)
    # the bound that survives before cell measures are traded for mu(A), mu(B)
    d = d_n(n)
    relative = (
        (1 - float(t)) * float(V.side) * float(mu_a / V.measure()) ** d
        + float(t) * float(W.side) * float(mu_b / W.measure()) ** d
    )
    reports = []
    for cp in cands:
        la, ha = phi_interval(V, cp.entry_index, A)
        lb, hb = phi_interval(W, cp.exit_index, B)
        h1 = (1 - t) * V.side * (ha - la) + t * W.side * (hb - lb)
        lhs = phi_power(n, h1)
        reports.append(
            InequalityReport(
                format_fraction(t),
                h1,
                lhs,
                rhs,
                cp.in_window(t),
                {
                    "V": str(V),
                    "W": str(W),
                    "entry": str(cp.entry),
                    "exit": str(cp.exit),
                    "mu_A": format_fraction(mu_a),
                    "mu_B": format_fraction(mu_b),
                    "relative_rhs": relative,
                    "relative_ok": lhs - relative >= -GUARD,
                },
            )
        )
    return MainReport(reports)


# -- seeded configurations --------------------------------------------------------------

def random_connected_union(rng: random.Random, outer: Cell, depth: int, size: int) -> list[Cell]:
    """Grow a connected union of ``size`` subcells of ``outer`` at ``depth`` levels below it."""
    subs = [Cell(outer.word + w, outer.n) for w in itertools.product(range(outer.n + 1), repeat=depth)]
    size = min(size, len(subs))
    corners = {c.word: _corners(c) for c in subs}
    chosen = [rng.choice(subs)]
    while len(chosen) < size:
        frontier = [
            c for c in subs
            if c not in chosen and any(corners[c.word] & corners[d.word] for d in chosen)
        ]
        chosen.append(rng.choice(frontier))
    return sorted(chosen, key=lambda c: c.word)


def union_configurations(seed: int, count: int, ts=(Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))):
    """Yield ``(A_cells, B_cells, cp, t)`` with both unions spanning their minimal cells.

    Configurations whose common path window misses every ``t`` in ``ts`` are skipped.
    """
    from .sampling import regular_cell_pair

    rng = random.Random(seed)
    made = 0
    while made < count:
        cp = regular_cell_pair(rng, n_choices=(2, 3), max_level=3)
        depth = rng.randint(1, 2)
        A = random_connected_union(rng, cp.A, depth, rng.randint(2, 4))
        B = random_connected_union(rng, cp.B, depth, rng.randint(2, 4))
        if minimal_cell(A) != cp.A or minimal_cell(B) != cp.B:
            continue
        window = [t for t in ts if cp.in_window(t)]
        if not window:
            continue
        yield A, B, cp, rng.choice(window)
        made += 1


def cell_configurations(seed: int, count: int):
    """Yield ``(cp, t)`` for random regular cell pairs with t inside the window."""
    from .sampling import rational_in, regular_cell_pair

    rng = random.Random(seed)
    for _ in range(count):
        cp = regular_cell_pair(rng)
        t = rational_in(rng, cp.t1f, cp.t2i)
        if t in (0, 1):
            t = (cp.t1f + cp.t2i) / 2
        yield cp, t
