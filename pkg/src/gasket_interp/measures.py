"""Self-similar measures on [0, 1] and the interpolating measures on a common path.

Conventions used throughout: a one-dimensional self-similar measure puts
mass ``w0`` on ``[0, 1/2]`` (map ``x -> x/2``) and ``w1`` on ``[1/2, 1]``
(map ``x -> (x+1)/2``).  The projection of the standard measure of S_n on
the barycentric coordinate of a corner is ``nu_n`` with ``w0 = n/(n+1)`` and
``w1 = 1/(n+1)``: the subcell at the corner is where the coordinate is at
least 1/2.

On the unit square the four maps are ``G_ij(x) = (x + q_ij)/2`` with
``q_ij = (i, j)`` and weights ``w_ij``; ``i`` indexes the A-side coordinate
``s`` and ``j`` the B-side coordinate ``r``.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import Cell, dyadic_exponent, format_fraction, is_dyadic
from .errors import BudgetExceeded, InvalidWeights
from .interpolation import CommonPath, interpolant_interval

CSV_VERSION = "gasket-interp-histogram/1"
EXACT_MAX_DEPTH = 12
MAX_DEPTH = 22
GRID_MAX_DEPTH = 11
GRID_EXACT_MAX_DEPTH = 6


def _check_depth(M: int, limit: int) -> None:
    if M < 0:
        raise ValueError("depth must be nonnegative")
    if M > limit:
        raise BudgetExceeded(f"depth {M} exceeds the budget of {limit}")


# -- 1D self-similar measures ------------------------------------------------------

@dataclass(frozen=True)
class SelfSimilarMeasure1D:
    w0: Fraction
    w1: Fraction

    def __post_init__(self):
        object.__setattr__(self, "w0", Fraction(self.w0))
        object.__setattr__(self, "w1", Fraction(self.w1))
        if self.w0 < 0 or self.w1 < 0 or self.w0 + self.w1 != 1:
            raise InvalidWeights(f"weights {self.w0}, {self.w1} must be nonnegative and sum to 1")

    @classmethod
    def standard(cls, n: int) -> "SelfSimilarMeasure1D":
        if n < 1:
            raise ValueError("n must be at least 1")
        return cls(Fraction(n, n + 1), Fraction(1, n + 1))

    @classmethod
    def from_cell_weights(cls, mu: Sequence, i: int) -> "SelfSimilarMeasure1D":
        """Projection of the self-similar measure with weights ``mu`` on coordinate ``i``."""
        mu = check_weights(mu)
        return cls(1 - mu[i], mu[i])

    def weight(self, digit: int) -> Fraction:
        return self.w1 if digit else self.w0

    def cdf(self, x) -> Fraction:
        return nu_cdf(self, x)

    def interval(self, a, b) -> Fraction:
        """Mass of ``[a, b]`` (the measure has no atoms unless a weight is 0 or 1)."""
        return nu_cdf(self, b) - nu_cdf(self, a)

    def dimension(self) -> float:
        """Entropy over log 2."""
        return -sum(float(w) * math.log(w) for w in (self.w0, self.w1) if w) / math.log(2)


def check_weights(mu: Sequence) -> tuple[Fraction, ...]:
    mu = tuple(Fraction(x) for x in mu)
    if len(mu) < 2:
        raise InvalidWeights("need at least two weights")
    if any(x <= 0 for x in mu):
        raise InvalidWeights("weights must be positive")
    if sum(mu) != 1:
        raise InvalidWeights(f"weights sum to {sum(mu)}, not 1")
    return mu


def nu_cdf(measure: SelfSimilarMeasure1D, x) -> Fraction:
    """Exact ``measure([0, x])`` at a dyadic ``x``.

    If ``x = 0.b1 b2 ... bL`` then the value is the sum over positions with
    ``b_j = 1`` of ``w0 * prod_{i<j} w_{b_i}``.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError("x must lie in [0, 1]")
    if not is_dyadic(x):
        raise ValueError(f"{x} is not dyadic")
    if x == 1:
        return Fraction(1)
    e = dyadic_exponent(x)
    num = x.numerator
    total = Fraction(0)
    prefix = Fraction(1)
    for j in range(1, e + 1):
        bit = (num >> (e - j)) & 1
        if bit:
            total += prefix * measure.w0
            prefix *= measure.w1
        else:
            prefix *= measure.w0
    return total


def nu_dimension(n: int) -> float:
    if n < 1:
        raise ValueError("n must be at least 1")
    return ((n + 1) * math.log(n + 1) - n * math.log(n)) / ((n + 1) * math.log(2))


def pair_dimension(n: int) -> float:
    return 2 * nu_dimension(n)


# -- histograms ---------------------------------------------------------------------

@dataclass(frozen=True)
class Histogram:
    """Masses of the dyadic bins ``[k 2^-M, (k+1) 2^-M)`` of a parameter interval.

    ``support`` is the interval of the physical coordinate (arclength along a
    common path, or [0, 1]) that the parameter interval is mapped onto.
    """

    masses: tuple
    exact: bool
    normalization: Fraction
    support: tuple = (Fraction(0), Fraction(1))
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def depth(self) -> int:
        return len(self.masses).bit_length() - 1

    def __len__(self) -> int:
        return len(self.masses)

    def total(self):
        if self.exact:
            return sum(self.masses, Fraction(0))
        return math.fsum(self.masses)

    def edges(self, k: int) -> tuple[Fraction, Fraction]:
        den = len(self.masses)
        return Fraction(k, den), Fraction(k + 1, den)

    def cumulative(self) -> list:
        out, acc = [], (Fraction(0) if self.exact else 0.0)
        if self.exact:
            for v in self.masses:
                acc += v
                out.append(acc)
            return out
        comp = 0.0  # Neumaier running compensation
        for v in self.masses:
            s = acc + v
            comp += (acc - s) + v if abs(acc) >= abs(v) else (v - s) + acc
            acc = s
            out.append(acc + comp)
        return out

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.masses], dtype=float)

    def density(self) -> np.ndarray:
        return self.as_array() * len(self.masses)

    def l1(self, other: "Histogram") -> float:
        if len(self) != len(other):
            raise ValueError("histograms have different depths")
        return math.fsum(abs(a - b) for a, b in zip(self.as_array(), other.as_array()))

    def reversed(self) -> "Histogram":
        return Histogram(tuple(reversed(self.masses)), self.exact, self.normalization, self.support, dict(self.meta))

    def scaled(self, c, support=None, meta: dict | None = None) -> "Histogram":
        c = Fraction(c)
        if self.exact:
            masses = tuple(v * c for v in self.masses)
        else:
            masses = tuple(float(v) * float(c) for v in self.masses)
        return Histogram(
            masses,
            self.exact,
            self.normalization * c,
            support if support is not None else self.support,
            {**self.meta, **(meta or {})},
        )

    def header(self, extra: dict | None = None) -> dict:
        meta = {
            "depth": self.depth,
            "exact": self.exact,
            "normalization": format_fraction(self.normalization),
            "support": [format_fraction(s) for s in self.support],
        }
        meta.update(self.meta)
        meta.update(extra or {})
        return meta

    def to_csv(self, extra: dict | None = None) -> str:
        buf = io.StringIO()
        meta = self.header(extra)
        buf.write(f"# {CSV_VERSION} " + json.dumps(meta, sort_keys=True) + "\n")
        buf.write("bin_left,bin_right,mass\n")
        den = len(self.masses)
        for k, v in enumerate(self.masses):
            buf.write(f"{k / den!r},{(k + 1) / den!r},{float(v)!r}\n")
        return buf.getvalue()


def nu_histogram(measure: SelfSimilarMeasure1D, M: int, exact: bool | None = None) -> Histogram:
    """Bin masses at depth M: each bin's mass is the product of its digit weights."""
    if exact is None:
        exact = M <= EXACT_MAX_DEPTH
    _check_depth(M, EXACT_MAX_DEPTH if exact else MAX_DEPTH)
    if exact:
        h: list = [Fraction(1)]
        for _ in range(M):
            h = [measure.w0 * v for v in h] + [measure.w1 * v for v in h]
        masses = tuple(h)
    else:
        arr = np.ones(1)
        w0, w1 = float(measure.w0), float(measure.w1)
        for _ in range(M):
            arr = np.concatenate([w0 * arr, w1 * arr])
        masses = tuple(arr.tolist())
    meta = {"measure": "nu", "w0": format_fraction(measure.w0), "w1": format_fraction(measure.w1)}
    return Histogram(masses, exact, Fraction(1), meta=meta)


# -- pushforwards of the product measure ----------------------------------------------

@dataclass(frozen=True)
class PushforwardSpec:
    """Parameters of ``nu_tilde = (nu x nu) o psi_t^-1``.

    ``weights`` are ``(w00, w01, w10, w11)``.  ``t`` is an exact rational
    unless ``approx`` is set, in which case it may be a float.
    """

    t: Fraction | float
    k: int
    m: int
    weights: tuple
    approx: bool = False

    def __post_init__(self):
        if self.approx:
            object.__setattr__(self, "t", float(self.t))
        else:
            if isinstance(self.t, float):
                raise ValueError("float t requires approx=True")
            object.__setattr__(self, "t", Fraction(self.t))
        if not 0 <= self.t <= 1:
            raise ValueError("t must lie in [0, 1]")
        w = tuple(Fraction(x) for x in self.weights)
        if len(w) != 4 or any(x < 0 for x in w) or sum(w) != 1:
            raise InvalidWeights(f"pair weights {w} must be four nonnegative numbers summing to 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def standard(cls, n: int, t, k: int = 1, m: int = 1, approx: bool = False) -> "PushforwardSpec":
        w0, w1 = Fraction(n, n + 1), Fraction(1, n + 1)
        return cls(t, k, m, (w0 * w0, w0 * w1, w1 * w0, w1 * w1), approx)

    def w(self, i: int, j: int) -> Fraction:
        return self.weights[2 * i + j]

    @property
    def alpha(self):
        return (1 - self.t) / (1 << self.k)

    @property
    def beta(self):
        return self.t / (1 << self.m)

    def _int_ratio(self) -> tuple[int, int]:
        """Integers proportional to ``(alpha, beta)``."""
        t = Fraction(self.t)
        p, q = t.numerator, t.denominator
        return (q - p) << self.m, p << self.k

    def offsets(self) -> dict:
        """``c_ij`` with ``psi o G_ij o psi^-1 (x) = x/2 + c_ij``."""
        a, b = self.alpha, self.beta
        return {(i, j): (a * i + b * (1 - j)) / (2 * (a + b)) for i in (0, 1) for j in (0, 1)}

    def to_dict(self) -> dict:
        t = repr(self.t) if self.approx else format_fraction(self.t)
        return {"t": t, "k": self.k, "m": self.m, "weights": [format_fraction(w) for w in self.weights]}


def pair_weights(mu: Sequence, i: int, j: int) -> tuple[Fraction, ...]:
    """``(w00, w01, w10, w11)`` for entry corner index ``i`` and exit corner index ``j``.

    Digit 1 on a side means the subcell at the corner, of mass ``mu[i]``
    (resp. ``mu[j]``); digit 0 means the other n subcells.
    """
    mu = check_weights(mu)
    n = len(mu) - 1
    if not (0 <= i <= n and 0 <= j <= n):
        raise InvalidWeights("corner index out of range")
    ai, aj = mu[i], mu[j]
    return ((1 - ai) * (1 - aj), (1 - ai) * aj, ai * (1 - aj), ai * aj)


def weighted_variants(mu: Sequence, i: int, j: int, t=Fraction(1, 2), k: int = 1, m: int = 1) -> PushforwardSpec:
    return PushforwardSpec(t, k, m, pair_weights(mu, i, j))


def _square_masses(spec: PushforwardSpec, M: int, exact: bool):
    """Product-measure mass of each depth-M square as a 2D array indexed [s_bin, r_bin]."""
    if exact:
        W = [[spec.w(0, 0), spec.w(0, 1)], [spec.w(1, 0), spec.w(1, 1)]]
        P = [[Fraction(1)]]
        for _ in range(M):
            size = len(P)
            Q = [[Fraction(0)] * (2 * size) for _ in range(2 * size)]
            for a in range(size):
                for b in range(size):
                    v = P[a][b]
                    for x in (0, 1):
                        for y in (0, 1):
                            Q[2 * a + x][2 * b + y] = v * W[x][y]
            P = Q
        return P
    W = np.array([[float(spec.w(0, 0)), float(spec.w(0, 1))], [float(spec.w(1, 0)), float(spec.w(1, 1))]])
    P = np.ones((1, 1))
    for _ in range(M):
        P = np.kron(P, W)
    return P


def _accumulate(idx: np.ndarray, vals: np.ndarray, size: int) -> tuple:
    """Per-bin compensated sums, independent of input order."""
    order = np.lexsort((vals, idx))
    idx, vals = idx[order], vals[order]
    cuts = np.searchsorted(idx, np.arange(size + 1))
    vl = vals.tolist()
    return tuple(math.fsum(vl[cuts[b]:cuts[b + 1]]) for b in range(size))


def tilde_nu_histogram_grid(spec: PushforwardSpec, M: int, exact: bool = False) -> Histogram:
    """Push every depth-M square of the unit square through ``psi_t``.

    The image of a square is an interval of width exactly ``2^-M``; its mass
    is split between the (at most two) bins it meets in proportion to overlap.
    """
    _check_depth(M, GRID_EXACT_MAX_DEPTH if exact else GRID_MAX_DEPTH)
    if exact and spec.approx:
        raise ValueError("exact mode needs a rational t")
    size = 1 << M
    top = size - 1
    meta = {"measure": "tilde-nu", "method": "grid", **spec.to_dict()}
    if exact:
        A, B = spec._int_ratio()
        Q = A + B
        P = _square_masses(spec, M, True)
        out = [Fraction(0)] * size
        for a in range(size):
            for b in range(size):
                lo, rem = divmod(A * a + B * (top - b), Q)
                frac = Fraction(rem, Q)
                out[lo] += P[a][b] * (1 - frac)
                if rem:
                    out[lo + 1] += P[a][b] * frac
        return Histogram(tuple(out), True, Fraction(1), meta=meta)

    P = _square_masses(spec, M, False)
    a = np.arange(size, dtype=np.int64)[:, None]
    b = np.arange(size, dtype=np.int64)[None, :]
    if not spec.approx:
        A, B = spec._int_ratio()
        Q = A + B
        if Q * size < (1 << 62):
            N = A * a + B * (top - b)
            lo = N // Q
            frac = (N % Q).astype(float) / Q
        else:
            spec_f = PushforwardSpec(float(spec.t), spec.k, spec.m, spec.weights, approx=True)
            return tilde_nu_histogram_grid(spec_f, M)
    else:
        al, be = spec.alpha, spec.beta
        u = (al * a + be * (top - b)) / (al + be)
        lo = np.floor(u).astype(np.int64)
        frac = u - lo
        over = lo >= top
        lo[over], frac[over] = top, 0.0
    lo = np.broadcast_to(lo, P.shape).ravel()
    frac = np.broadcast_to(frac, P.shape).ravel()
    p = P.ravel()
    hi = np.minimum(lo + 1, top)
    idx = np.concatenate([lo, hi])
    vals = np.concatenate([p * (1 - frac), p * frac])
    return Histogram(_accumulate(idx, vals, size), False, Fraction(1), meta=meta)


@dataclass(frozen=True)
class IFSRun:
    histogram: Histogram
    iterations: int
    residuals: tuple  # L1 change per iteration
    converged: bool


def _ifs_pieces(spec: PushforwardSpec, R: int):
    """Source index, target index and mass fraction of the pushed bins at resolution R."""
    size = 1 << R
    src = np.arange(size, dtype=np.int64)
    offsets = spec.offsets()
    srcs, tgts, fracs = [], [], []
    for (i, j), c in offsets.items():
        w = float(spec.w(i, j))
        if w == 0:
            continue
        # image of bin a is [a/2 + c*size, a/2 + c*size + 1/2) in bin units
        if spec.approx:
            u = src / 2 + float(c) * size
            lo = np.floor(u).astype(np.int64)
            f = u - lo
        else:
            c = Fraction(c)
            num, den = c.numerator * size, c.denominator
            # u = src/2 + num/den = (src*den + 2*num) / (2*den)
            N = src * den + 2 * num
            lo = N // (2 * den)
            f = (N % (2 * den)).astype(float) / (2 * den)
        first = np.minimum(1.0, 2.0 * (1.0 - f))
        over = lo >= size - 1
        first[over] = 1.0
        lo = np.minimum(lo, size - 1)
        srcs += [src, src]
        tgts += [lo, np.minimum(lo + 1, size - 1)]
        fracs += [w * first, w * (1.0 - first)]
    return np.concatenate(srcs), np.concatenate(tgts), np.concatenate(fracs)


def tilde_nu_histogram_ifs(
    spec: PushforwardSpec,
    M: int,
    iterations: int = 500,
    tol: float = 1e-13,
    oversample: int = 4,
) -> IFSRun:
    """Iterate the transfer operator of ``{x/2 + c_ij}`` from the uniform histogram.

    The iteration runs at depth ``M + oversample`` and is summed down to M.
    """
    R = M + oversample
    _check_depth(R, MAX_DEPTH)
    size = 1 << R
    src, tgt, frac = _ifs_pieces(spec, R)
    h = np.full(size, 1.0 / size)
    residuals = []
    converged = False
    it = 0
    for it in range(1, iterations + 1):
        nxt = np.bincount(tgt, weights=frac * h[src], minlength=size)
        res = float(np.abs(nxt - h).sum())
        residuals.append(res)
        h = nxt
        if res < tol:
            converged = True
            break
    coarse = h.reshape(1 << M, 1 << oversample)
    masses = tuple(math.fsum(row) for row in coarse.tolist())
    meta = {
        "measure": "tilde-nu",
        "method": "ifs",
        "iterations": it,
        "converged": converged,
        "oversample": oversample,
        **spec.to_dict(),
    }
    return IFSRun(Histogram(masses, False, Fraction(1), meta=meta), it, tuple(residuals), converged)


# -- interpolating measures on a common path -----------------------------------------------

def _cell_mass(cell: Cell, mu) -> Fraction:
    return cell.measure(None if mu is None else check_weights(mu))


def eta_cell_to_point(cp: CommonPath, t, M: int, exact: bool | None = None, weights=None) -> Histogram:
    """Histogram of ``eta_t`` (mass of A pushed to ``Z_t(A, b)``) in the ``H_t`` parameter.

    Bin masses are ``mu(A)`` times the projected measure; ``support`` holds the
    arclength interval of ``Z_t(A, b)`` measured from the entry point.
    """
    if cp.m is not None:
        raise ValueError("eta_cell_to_point needs a point target")
    iv = interpolant_interval(cp, t)
    if weights is None:
        base = SelfSimilarMeasure1D.standard(cp.n)
    else:
        base = SelfSimilarMeasure1D.from_cell_weights(weights, cp.entry_index)
    hist = nu_histogram(base, M, exact)
    meta = {"measure": "eta", "case": "cell-to-point", "t": format_fraction(iv.t), **cp.to_dict()}
    return hist.scaled(_cell_mass(cp.A, weights), support=(iv.start, iv.end), meta=meta)


def eta_cell_to_cell(
    cp: CommonPath,
    t,
    M: int,
    method: str = "grid",
    weights=None,
    exact: bool = False,
) -> Histogram:
    """Histogram of ``eta_t`` for two cells: ``mu(A) mu(B)`` times ``nu_tilde`` in the ``H_t`` parameter."""
    if cp.m is None:
        raise ValueError("eta_cell_to_cell needs a cell target")
    iv = interpolant_interval(cp, t)
    if weights is None:
        spec = PushforwardSpec.standard(cp.n, iv.t, cp.k, cp.m)
    else:
        spec = PushforwardSpec(iv.t, cp.k, cp.m, pair_weights(weights, cp.entry_index, cp.exit_index))
    if method == "grid":
        hist = tilde_nu_histogram_grid(spec, M, exact=exact)
    elif method == "ifs":
        hist = tilde_nu_histogram_ifs(spec, M).histogram
    else:
        raise ValueError(f"unknown method {method!r}")
    norm = _cell_mass(cp.A, weights) * _cell_mass(cp.B, weights)
    meta = {"measure": "eta", "case": "cell-to-cell", **cp.to_dict()}
    return hist.scaled(norm, support=(iv.start, iv.end), meta=meta)
