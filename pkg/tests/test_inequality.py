from __future__ import annotations

import math
import random
from decimal import Decimal, localcontext
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from gasket_interp.core import Cell
from gasket_interp.errors import DomainError, NoCommonPath, NotConnected
from gasket_interp.inequality import (
    GUARD,
    cell_configurations,
    check_cell_inequality,
    check_connected,
    check_gineq,
    check_main_inequality,
    check_phi_lemma,
    concavity_defect,
    d_n,
    measure_exponent,
    minimal_cell,
    phi,
    phi_interval,
    phi_power,
    random_connected_union,
    union_configurations,
)
from gasket_interp.interpolation import Z, build_common_path
from gasket_interp.measures import SelfSimilarMeasure1D
from gasket_interp.metric import on_polyline

from conftest import cell


def _cells(words, n=2):
    return [Cell(tuple(w), n) for w in words]


# -- Phi_n ----------------------------------------------------------------------------

def test_exponents():
    assert d_n(2) == pytest.approx(math.log(2) / math.log(1.5), rel=1e-15)
    assert measure_exponent(2) == pytest.approx(math.log(2) / math.log(3), rel=1e-15)
    with pytest.raises(DomainError):
        d_n(0)


@settings(max_examples=300)
@given(st.integers(2, 10), st.one_of(st.just(0.0), st.floats(1e-100, 1)))
def test_phi_matches_direct_formula(n, x):
    # 150-digit reference, free of the cancellation near x = 0
    with localcontext() as ctx:
        ctx.prec = 150
        d = Decimal(2).ln() / (Decimal(n + 1) / Decimal(n)).ln()
        inner = 1 - (1 - Decimal(x)) ** d
        ref = float(inner ** (1 / d)) if inner > 0 else 0.0
    assert phi(n, x) == pytest.approx(ref, rel=1e-12, abs=1e-300)
    assert 0 <= phi_power(n, x) <= 1


def test_phi_endpoints_and_domain():
    assert phi(3, 0) == 0 and phi(3, 1) == 1
    with pytest.raises(DomainError):
        phi(2, 1.5)
    with pytest.raises(DomainError):
        phi(2, float("nan"))


@pytest.mark.parametrize("n", range(2, 11))
def test_phi_lemma_grid(n):
    rep = check_phi_lemma(n)
    assert rep.ok
    assert rep.max_violation_lower <= 1e-12 and rep.max_violation_upper <= 1e-12


def test_phi_power_is_concave():
    for n in (2, 5, 10):
        assert concavity_defect(n) <= 1e-12


@pytest.mark.parametrize("n", range(2, 11))
def test_cdf_below_phi_at_depth_12(n):
    rep = check_gineq(n, 12)
    assert rep.ok, rep.to_dict()
    assert len(rep.rows) == (1 << 12) + 1


def test_gineq_against_independent_cdf():
    nu = SelfSimilarMeasure1D.standard(4)
    rep = check_gineq(4, 8)
    for x, c, p in rep.rows:
        assert c == nu.cdf(x)
        assert p + GUARD >= float(c)


def test_gineq_csv_header():
    text = check_gineq(2, 3).to_csv()
    assert text.splitlines()[1] == "x,cdf,phi"
    assert len(text.splitlines()) == 2 + 9


# -- cells ---------------------------------------------------------------------------

def test_cell_inequality_sharp_for_symmetric_cells():
    rep = check_cell_inequality(cell("[1 1]", 2), cell("[2 2]", 2), F(1, 2))
    assert rep.h1 == F(1, 4)
    assert rep.ok and rep.sharp


def test_cell_inequality_on_seeded_configurations():
    for cp, t in cell_configurations(0, 40):
        rep = check_cell_inequality(cp.A, cp.B, t)
        assert rep.in_window and rep.ok, rep.to_dict()


def test_cell_inequality_rejects_bad_t():
    with pytest.raises(DomainError):
        check_cell_inequality(cell("[1 1]", 2), cell("[2 2]", 2), 1)


# -- unions ---------------------------------------------------------------------------

def test_connectivity():
    check_connected(_cells([(0, 0), (0, 1)]))
    with pytest.raises(NotConnected):
        check_connected(_cells([(0, 0), (1, 1)]))
    with pytest.raises(NotConnected):
        check_connected([])


def test_minimal_cell_and_phi_interval():
    cells = _cells([(1, 0, 1), (1, 0, 2)])
    V = minimal_cell(cells)
    assert V == Cell((1, 0), 2)
    assert phi_interval(V, 0, cells) == (F(0), F(1, 2))


def test_random_union_is_connected():
    rng = random.Random(4)
    for _ in range(20):
        u = random_connected_union(rng, Cell((1,), 3), 2, 5)
        assert len(u) == 5
        check_connected(u)


def test_main_inequality_holds_on_full_cells():
    rep = check_main_inequality(_cells([(1, 1)]), _cells([(2, 2)]), F(1, 2))
    assert rep.ok and rep.relative_ok


def test_main_inequality_on_seeded_unions():
    for A, B, cp, t in union_configurations(0, 40):
        rep = check_main_inequality(A, B, t)
        assert rep.ok, rep.to_dict()


def test_main_inequality_touching_minimal_cells():
    with pytest.raises(NoCommonPath):
        check_main_inequality(_cells([(0, 1), (0, 2)]), _cells([(1, 0), (1, 2)]), F(1, 2))


def test_main_inequality_counterexample():
    # the length bound is exact here, yet it falls short of the measure side;
    # only the intermediate bound with relative measures survives
    A = _cells([(0, 2, 0, 0, 2), (0, 2, 0, 2, 0)])
    B = _cells([(1, 0, 1, 1), (1, 0, 1, 2), (1, 0, 2, 1)])
    t = F(1, 4)
    rep = check_main_inequality(A, B, t)
    (path,) = rep.reports
    assert path.h1 == F(5, 128) and path.in_window
    assert not rep.ok
    assert rep.relative_ok
    assert path.slack < -1e-3

    # brute force: the interval swept by Z_t over all corner pairs
    cp = build_common_path(minimal_cell(A), minimal_cell(B))
    qs = [
        on_polyline(cp.gamma, Z(cp, a, b, t))
        for c in A for a in c.boundary_points()
        for d in B for b in d.boundary_points()
    ]
    assert max(qs) - min(qs) == F(5, 128)
