"""The thirteen acceptance criteria, one test each.

Every test prints a single ``[criterion N] PASS|FAIL: ...`` line (shown even
under output capture).  ``python tests/test_acceptance.py`` runs them all
without pytest and prints the same lines.
"""

from __future__ import annotations

import functools
import math
import random
import sys
import tempfile
import time
from fractions import Fraction as F
from pathlib import Path

import pytest

from gasket_interp.core import Cell, PointAddress, address_to_bary, common_cell, phi_projection
from gasket_interp.inequality import (
    cell_configurations,
    check_cell_inequality,
    check_gineq,
    check_main_inequality,
    check_phi_lemma,
    union_configurations,
)
from gasket_interp.interpolation import H, Z, psi
from gasket_interp.measures import (
    PushforwardSpec,
    SelfSimilarMeasure1D,
    eta_cell_to_cell,
    eta_cell_to_point,
    nu_dimension,
    nu_histogram,
    pair_dimension,
    tilde_nu_histogram_grid,
    tilde_nu_histogram_ifs,
)
from gasket_interp.metric import (
    P1,
    P2,
    count_geodesics,
    distance,
    enumerate_geodesics,
    on_polyline,
    point_along_bary,
)
from gasket_interp.oracle import verify_metric
from gasket_interp.sampling import (
    cell_point_pair,
    random_address,
    random_distinct_pair,
    random_point_in,
    rational_in,
    regular_cell_pair,
)


def _report(number: int, ok: bool, detail: str, capsys=None) -> None:
    line = f"[criterion {number:2d}] {'PASS' if ok else 'FAIL'}: {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)


def _addr(text: str, n: int) -> PointAddress:
    return PointAddress.parse(text, n)


# -- shared oracle runs -----------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _verify(n: int, m: int):
    return verify_metric(n, m, counts=True)


# -- criteria -------------------------------------------------------------------------

def criterion_1():
    parts, ok = [], True
    for n, m in ((2, 5), (3, 3)):
        rep = _verify(n, m)
        good = not rep.distance_mismatches and rep.seconds < 60
        ok &= good
        parts.append(f"(n={n}, m={m}) {rep.vertices} vertices, {rep.pairs} pairs, "
                     f"{len(rep.distance_mismatches)} distance mismatches, {rep.seconds:.1f}s")
    return ok, "; ".join(parts)


def criterion_2():
    parts, ok = [], True
    for n, levels, cap in ((2, range(1, 6), 5), (3, range(1, 5), 8)):
        best = 0
        for m in levels:
            rep = _verify(n, m)
            ok &= not rep.count_mismatches and not rep.distance_mismatches
            best = max(best, rep.max_count)
        ok &= best == cap
        parts.append(f"n={n}: max count {best} (cap {cap}) over m<={levels[-1]}")
    return ok, "; ".join(parts) + "; closed-form counts agree with BFS on every pair"


def _merge_collinear(points):
    pts = [tuple(p) for p in points]
    out = [pts[0]]
    for p in pts[1:]:
        if p == out[-1]:
            continue
        if len(out) >= 2:
            a, b = out[-2], out[-1]
            u = [y - x for x, y in zip(a, b)]
            v = [y - x for x, y in zip(b, p)]
            ratios = {y / x for x, y in zip(u, v) if x}
            if all((x == 0) == (y == 0) for x, y in zip(u, v)) and len(ratios) == 1 and min(ratios) > 0:
                out[-1] = p
                continue
        out.append(p)
    return tuple(out)


def _route(*texts):
    return _merge_collinear(address_to_bary(_addr(t, 3)).coords for t in texts)


def criterion_3():
    xs, ys = "[2 0 2|1]", "[3 0 3|1]"
    x, y = _addr(xs, 3), _addr(ys, 3)
    expected = set()
    for a in ("[2 0 2|3]", "[2 0 1|3]"):
        for b in ("[3 0 3|2]", "[3 0 1|2]"):
            expected.add((P1, _route(xs, a, "[2 0|3]", "[2|3]", "[3 0|2]", b, ys)))
    for a in ("[2 0 2|0]", "[2 0 1|0]"):
        for b in ("[3 0 3|0]", "[3 0 1|0]"):
            expected.add((P2, _route(xs, a, "[2 0|0]", "[3|0]", b, ys)))
    gs = enumerate_geodesics(x, y)
    got = {(g.kind, tuple(p.coords for p in g.nodes)) for g in gs}
    d, c = distance(x, y), count_geodesics(x, y)
    kinds = sorted(g.kind for g in gs)
    ok = d == 1 and c == 8 and got == expected and kinds == [P1] * 4 + [P2] * 4
    return ok, f"distance {d}, {c} geodesics ({kinds.count(P1)} P1, {kinds.count(P2)} P2), anchors match: {got == expected}"


def criterion_4():
    x, y = _addr("[1 1|0]", 2), _addr("[2 2|0]", 2)
    gs = enumerate_geodesics(x, y)
    kinds = sorted(g.kind for g in gs)
    d, c = distance(x, y), count_geodesics(x, y)
    ok = d == 1 and c == 5 and kinds == [P1] * 4 + [P2]
    return ok, f"distance {d}, {c} geodesics ({kinds.count(P1)} P1, {kinds.count(P2)} P2)"


def criterion_5():
    nu2 = SelfSimilarMeasure1D.standard(2)
    ok = nu2.cdf(F(1, 2)) == F(2, 3)
    bad_ss = 0
    for n in range(2, 11):
        nu = SelfSimilarMeasure1D.standard(n)
        rng = random.Random(n)
        for _ in range(1000):
            e = rng.randint(0, 20)
            y = F(rng.randint(0, 1 << e), 1 << e)
            bad_ss += nu.cdf(y / 2) != nu.w0 * nu.cdf(y)
            bad_ss += nu.cdf((1 + y) / 2) != nu.w0 + nu.w1 * nu.cdf(y)
    bad_hist = 0
    for n in (2, 3, 5, 10):
        nu = SelfSimilarMeasure1D.standard(n)
        for M in range(1, 13):
            h = nu_histogram(nu, M, exact=True)
            bad_hist += sum(acc != nu.cdf(F(k + 1, 1 << M)) for k, acc in enumerate(h.cumulative()))
    ok &= bad_ss == 0 and bad_hist == 0
    return ok, f"nu_2([0,1/2]) = {nu2.cdf(F(1, 2))}; self-similarity failures {bad_ss}/18000; histogram/CDF mismatches {bad_hist}"


def criterion_6():
    rng = random.Random(6)
    worst, exact_bad = 0.0, 0
    for _ in range(50):
        cp = cell_point_pair(rng)
        t = rational_in(rng, cp.t1f, F(1))
        h = eta_cell_to_point(cp, t, 8, exact=True)
        exact_bad += h.total() != F(1, (cp.n + 1) ** cp.k)
    for _ in range(50):
        cp = regular_cell_pair(rng)
        t = rational_in(rng, cp.t1f, cp.t2i)
        target = F(1, (cp.n + 1) ** (cp.k + cp.m))
        worst = max(worst, abs(eta_cell_to_cell(cp, t, 8).total() - float(target)))
        exact_bad += eta_cell_to_cell(cp, t, 3, exact=True).total() != target
    ok = exact_bad == 0 and worst <= 1e-12
    return ok, f"50 cell-to-point + 50 cell-to-cell: exact-mode mismatches {exact_bad}, max double-mode error {worst:.2e}"


def criterion_7():
    nu = nu_histogram(SelfSimilarMeasure1D.standard(2), 8)
    parts, ok = [], True
    outdir = Path(tempfile.mkdtemp(prefix="nu-tilde-"))
    hists = {}
    for t in ("0.10", "0.50", "0.75", "1.00"):
        spec = PushforwardSpec.standard(2, F(t))
        grid = tilde_nu_histogram_grid(spec, 8)
        ifs = tilde_nu_histogram_ifs(spec, 8).histogram
        (outdir / f"grid-{t}.csv").write_text(grid.to_csv({"n": 2}))
        (outdir / f"ifs-{t}.csv").write_text(ifs.to_csv({"n": 2}))
        l1 = grid.l1(ifs)
        ok &= l1 <= 0.02
        hists[t] = grid
        parts.append(f"t={t} L1={l1:.4f}")
    # the panel shapes: t=1 is nu reflected and t=1/2 is symmetric
    shape_1 = hists["1.00"].l1(nu.reversed()) < 1e-12
    shape_half = hists["0.50"].l1(hists["0.50"].reversed()) < 1e-12
    ok &= shape_1 and shape_half
    return ok, ", ".join(parts) + f"; t=1 reflects nu: {shape_1}; t=1/2 symmetric: {shape_half}; CSVs in {outdir}"


def criterion_8():
    def closed(n):
        return 2 * ((n + 1) * math.log(n + 1) - n * math.log(n)) / ((n + 1) * math.log(2))

    d8, d9 = pair_dimension(8), pair_dimension(9)
    ok = d8 > 1 > d9 and abs(d8 - closed(8)) <= 1e-12 and abs(d9 - closed(9)) <= 1e-12
    ok &= abs(nu_dimension(2) - 0.918296) <= 1e-6
    return ok, f"pair_dimension(8) = {d8:.12f}, pair_dimension(9) = {d9:.12f}, nu_dimension(2) = {nu_dimension(2):.9f}"


def criterion_9():
    bad, worst_lemma = 0, -math.inf
    min_slack = math.inf
    for n in range(2, 11):
        rep = check_gineq(n, 12)
        bad += rep.violations
        min_slack = min(min_slack, rep.min_slack)
        lem = check_phi_lemma(n, 10_000)
        worst_lemma = max(worst_lemma, lem.max_violation_lower, lem.max_violation_upper)
    ok = bad == 0 and worst_lemma <= 1e-12
    return ok, f"CDF above Phi at {bad} grid points (min slack {min_slack:.3e}); Phi recursion max violation {worst_lemma:.3e}"


def criterion_10():
    size, bad, checked = 256, 0, 0
    for n in range(2, 11):
        nu = SelfSimilarMeasure1D.standard(n)
        cdf = [nu.cdf(F(k, size)) for k in range(size + 1)]
        for x in range(size + 1):
            left, right = cdf[x], 1 - cdf[size - x]
            for a in range(size - x + 1):
                mid = cdf[a + x] - cdf[a]
                checked += 1
                bad += not (left >= mid >= right)
    return bad == 0, f"{checked} (n, a, x) triples at depth 8 for n=2..10, {bad} failures"


def criterion_11():
    union_bad = [i for i, (A, B, cp, t) in enumerate(union_configurations(0, 200))
                 if not check_main_inequality(A, B, t).ok]
    cell_bad = sum(not check_cell_inequality(cp.A, cp.B, t).ok for cp, t in cell_configurations(0, 100))
    sharp = check_cell_inequality(Cell((1, 1), 2), Cell((2, 2), 2), F(1, 2))
    ok = not union_bad and cell_bad == 0 and sharp.sharp
    return ok, (f"union violations {len(union_bad)}/200 {union_bad}, cell violations {cell_bad}/100, "
                f"symmetric slack {sharp.slack:.1e} (sharp: {sharp.sharp})")


def criterion_12():
    rng = random.Random(12)
    samples = bad = 0
    while samples < 100:
        cp = regular_cell_pair(rng)
        for _ in range(5):
            t = rational_in(rng, cp.t1f, cp.t2i)
            a, b = random_point_in(rng, cp.A), random_point_in(rng, cp.B)
            s = phi_projection(cp.A, cp.entry_index, a)
            r = phi_projection(cp.B, cp.exit_index, b)
            rhs = H(cp, t, psi(t, cp.k, cp.m, s, r))
            # left side straight from the definition: the time-t point of a
            # geodesic a -> b running through the common path
            carriers = [g for g in enumerate_geodesics(a, b)
                        if on_polyline(g, cp.entry) is not None and on_polyline(g, cp.exit) is not None]
            lhs = {point_along_bary(g, t) for g in carriers}
            bad += lhs != {rhs} or Z(cp, a, b, t) != rhs
            samples += 1
    return bad == 0, f"{samples} samples, {bad} with nonzero defect"


def criterion_13():
    rng = random.Random(13)
    asym = tri = 0
    for _ in range(10_000):
        n = rng.choice((2, 3, 4, 5))
        x, y, z = (random_address(rng, n, 6) for _ in range(3))
        dxy, dyz, dxz = distance(x, y), distance(y, z), distance(x, z)
        asym += dxy != distance(y, x)
        tri += dxz > dxy + dyz
    over = 0
    for _ in range(10_000):
        n = rng.choice((2, 3, 4, 5))
        x, y = random_distinct_pair(rng, n, 6)
        over += distance(x, y) > common_cell(x, y).side
    ok = asym == tri == over == 0
    return ok, f"10^4 triples: {asym} asymmetric, {tri} triangle failures; {over} pairs exceed their common cell side"


CRITERIA = [
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
    criterion_8, criterion_9, criterion_10, criterion_11, criterion_12, criterion_13,
]


@pytest.mark.slow
@pytest.mark.parametrize("number", range(1, 14))
def test_criterion(number, capsys):
    start = time.perf_counter()
    ok, detail = CRITERIA[number - 1]()
    _report(number, ok, f"{detail} [{time.perf_counter() - start:.1f}s]", capsys)
    assert ok, detail


if __name__ == "__main__":
    failures = 0
    for i, fn in enumerate(CRITERIA, start=1):
        start = time.perf_counter()
        ok, detail = fn()
        _report(i, ok, f"{detail} [{time.perf_counter() - start:.1f}s]")
        failures += not ok
    sys.exit(1 if failures else 0)
