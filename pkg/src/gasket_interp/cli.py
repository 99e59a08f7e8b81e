"""Command line interface: ``gasket-interp <command> ...``.

Addresses are written ``"[2 0 2 | 1]"``, cells ``"[1 1]"`` and rationals
``"p/q"``.  Every command is deterministic; the exit code is 0 iff all
checks it runs pass.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .core import Cell, PointAddress, canonicalize, format_fraction
from .errors import GasketError
from . import inequality, interpolation, measures, metric, oracle

L1_TOLERANCE = 0.02


# -- parsing helpers -------------------------------------------------------------------

def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _t_value(args):
    if args.t is None:
        return None
    if args.approx:
        return float(Fraction(args.t)) if "/" in args.t else float(args.t)
    if "." in args.t or "e" in args.t.lower():
        # decimal literals are exact rationals too, e.g. 0.1 -> 1/10
        return Fraction(args.t)
    return _rational(args.t)


def _weights(text: str | None):
    if not text:
        return None
    return tuple(_rational(w) for w in text.replace(";", ",").split(","))


def _point_or_cell(text: str, n: int):
    return PointAddress.parse(text, n) if "|" in text else Cell.parse(text, n)


def _union(text: str, n: int) -> list[Cell]:
    return [Cell.parse(part, n) for part in text.split(";") if part.strip()]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _suffixed(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}-{tag}{p.suffix or '.csv'}"))


# -- commands ----------------------------------------------------------------------------

def cmd_distance(args) -> int:
    x, y = PointAddress.parse(args.x, args.n), PointAddress.parse(args.y, args.n)
    d = metric.distance(x, y)
    count = metric.count_geodesics(x, y)
    if args.format == "json":
        _emit(_dump({"x": str(canonicalize(x)), "y": str(canonicalize(y)), "distance": format_fraction(d), "geodesics": count}), args.out)
    else:
        _emit(f"{format_fraction(d)} (geodesics: {count})\n", args.out)
    return 0


def cmd_geodesics(args) -> int:
    x, y = PointAddress.parse(args.x, args.n), PointAddress.parse(args.y, args.n)
    gs = metric.enumerate_geodesics(x, y)
    if args.format == "json":
        _emit(_dump([g.to_dict() for g in gs]), args.out)
    else:
        lines = [f"{len(gs)} geodesics of length {format_fraction(gs[0].length)}"]
        for g in gs:
            lines.append(f"{g.kind}: " + " -> ".join(str(a) for a in (canonicalize(x), *g.anchors, canonicalize(y))))
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_interpolate(args) -> int:
    t = _t_value(args)
    if t is None:
        raise SystemExit("interpolate needs -t")
    if args.cells:
        A = Cell.parse(args.x, args.n)
        B = _point_or_cell(args.y, args.n)
        cp = interpolation.build_common_path(A, B)
        out = {"common_path": cp.to_dict()}
        if cp.in_window(t):
            out["interval"] = interpolation.interpolant_interval(cp, t).to_dict()
        else:
            out["interval"] = None
            sa, sb = interpolation.largest_admissible_subcells(cp, t)
            out["admissible_subcells"] = [str(sa), str(sb)]
        _emit(_dump(out), args.out)
        return 0
    x, y = PointAddress.parse(args.x, args.n), PointAddress.parse(args.y, args.n)
    pts = interpolation.interpolate_points(x, y, t)
    if args.format == "json":
        _emit(_dump({"t": format_fraction(t), "points": [str(p) for p in pts]}), args.out)
    else:
        _emit("".join(f"{p}\n" for p in pts), args.out)
    return 0


def cmd_density(args) -> int:
    n, M = args.n, args.M
    mu = _weights(args.weights)
    if args.measure == "nu":
        if mu is None:
            base = measures.SelfSimilarMeasure1D.standard(n)
        else:
            base = measures.SelfSimilarMeasure1D.from_cell_weights(mu, args.corner)
        hist = measures.nu_histogram(base, M)
        _emit(_render(hist, args, {"n": n}), args.out)
        return 0
    if args.measure == "nu-cuml":
        rep = inequality.check_gineq(n, M)
        _emit(rep.to_csv(), args.out)
        return 0 if rep.ok else 1
    t = _t_value(args)
    if t is None:
        raise SystemExit(f"--measure {args.measure} needs -t")
    if args.measure == "tilde-nu":
        if mu is None:
            spec = measures.PushforwardSpec.standard(n, t, args.k, args.m, approx=args.approx)
        else:
            spec = measures.PushforwardSpec(t, args.k, args.m, measures.pair_weights(mu, args.corner, args.exit_corner), args.approx)
        hists = {}
        if args.method in ("grid", "both"):
            hists["grid"] = measures.tilde_nu_histogram_grid(spec, M)
        if args.method in ("ifs", "both"):
            hists["ifs"] = measures.tilde_nu_histogram_ifs(spec, M).histogram
        extra = {"n": n}
        if len(hists) == 1:
            (h,) = hists.values()
            _emit(_render(h, args, extra), args.out)
            return 0
        for tag, h in hists.items():
            text = _render(h, args, extra)
            if args.out:
                Path(_suffixed(args.out, tag)).write_text(text)
            else:
                sys.stdout.write(text)
        l1 = hists["grid"].l1(hists["ifs"])
        ok = l1 <= L1_TOLERANCE
        print(f"L1(grid, ifs) = {l1:.6g} (tolerance {L1_TOLERANCE}): {'OK' if ok else 'FAIL'}")
        return 0 if ok else 1
    if args.measure == "eta":
        if not (args.A and args.B):
            raise SystemExit("--measure eta needs --A and --B")
        A = Cell.parse(args.A, n)
        B = _point_or_cell(args.B, n)
        cp = interpolation.build_common_path(A, B)
        if isinstance(B, Cell):
            method = "grid" if args.method == "both" else args.method
            hist = measures.eta_cell_to_cell(cp, t, M, method=method, weights=mu)
        else:
            hist = measures.eta_cell_to_point(cp, t, M, weights=mu)
        _emit(_render(hist, args, {"n": n}), args.out)
        return 0
    raise SystemExit(f"unknown measure {args.measure}")


def _render(hist: measures.Histogram, args, extra: dict) -> str:
    if args.format == "json":
        meta = hist.header(extra)
        meta["masses"] = [float(v) for v in hist.masses]
        return _dump(meta)
    return hist.to_csv(extra)


def cmd_inequality(args) -> int:
    n = args.n
    if args.check == "phi-lemma":
        rep = inequality.check_phi_lemma(n, args.grid)
        _emit(_dump(rep.to_dict()), args.out)
        return 0 if rep.ok else 1
    if args.check == "gineq":
        rep = inequality.check_gineq(n, args.M)
        _emit(_dump(rep.to_dict()), args.out)
        return 0 if rep.ok else 1
    t = _t_value(args)
    if args.check == "cell":
        rep = inequality.check_cell_inequality(Cell.parse(args.A, n), Cell.parse(args.B, n), t)
        _emit(_dump(rep.to_dict()), args.out)
        return 0 if rep.ok else 1
    if args.check == "main":
        rep = inequality.check_main_inequality(_union(args.A, n), _union(args.B, n), t)
        _emit(_dump(rep.to_dict()), args.out)
        return 0 if rep.ok else 1
    if args.check == "sample":
        rows = []
        for idx, (A, B, cp, tt) in enumerate(inequality.union_configurations(args.seed, args.configs)):
            rep = inequality.check_main_inequality(A, B, tt)
            rows.append({"index": idx, "A": [str(c) for c in A], "B": [str(c) for c in B], **rep.to_dict()})
        bad = [r["index"] for r in rows if not r["ok"]]
        _emit(_dump({"seed": args.seed, "configurations": len(rows), "violations": bad, "results": rows}), args.out)
        print(f"{len(rows)} configurations, {len(bad)} violations", file=sys.stderr)
        return 0 if not bad else 1
    raise SystemExit(f"unknown check {args.check}")


def cmd_verify(args) -> int:
    rep = oracle.verify_metric(args.n, args.m, counts=not args.no_counts)
    if args.format == "json":
        d = rep.to_dict()
        d.pop("seconds")
        _emit(_dump(d), args.out)
    elif rep.ok:
        _emit(f"all pairs OK; max geodesics {rep.max_count}\n", args.out)
    else:
        bad = len(rep.distance_mismatches) + len(rep.count_mismatches)
        _emit(f"{bad} mismatches over {rep.pairs} pairs\n", args.out)
    return 0 if rep.ok else 1


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gasket-interp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=("text", "json")):
        sp.add_argument("-n", type=int, default=2, help="gasket dimension")
        sp.add_argument("--out", help="write output to this file")
        sp.add_argument("--format", choices=fmt, default=fmt[0])
        sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("distance", help="exact distance and geodesic count")
    common(sp)
    sp.add_argument("x")
    sp.add_argument("y")
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("geodesics", help="list all geodesics between two points")
    common(sp)
    sp.add_argument("x")
    sp.add_argument("y")
    sp.set_defaults(func=cmd_geodesics)

    sp = sub.add_parser("interpolate", help="interpolants between points or cells")
    common(sp)
    sp.add_argument("x", help="point, or cell with --cells")
    sp.add_argument("y", help="point, or cell/point with --cells")
    sp.add_argument("-t", required=True)
    sp.add_argument("--cells", action="store_true", help="treat x (and y) as cells")
    sp.add_argument("--approx", action="store_true", help="allow floating point t")
    sp.set_defaults(func=cmd_interpolate)

    sp = sub.add_parser("density", help="histograms of nu, nu-tilde and eta as CSV")
    common(sp, fmt=("csv", "json"))
    sp.add_argument("--measure", choices=("nu", "nu-cuml", "tilde-nu", "eta"), default="nu")
    sp.add_argument("-M", type=int, default=10, help="histogram depth")
    sp.add_argument("-t")
    sp.add_argument("-k", type=int, default=1)
    sp.add_argument("-m", type=int, default=1)
    sp.add_argument("--method", choices=("grid", "ifs", "both"), default="grid")
    sp.add_argument("--weights", help="cell weights mu^0,...,mu^n")
    sp.add_argument("--corner", type=int, default=0, help="entry corner index for weighted projections")
    sp.add_argument("--exit-corner", type=int, default=0)
    sp.add_argument("--A", help="cell for eta")
    sp.add_argument("--B", help="cell or point for eta")
    sp.add_argument("--approx", action="store_true", help="allow floating point t")
    sp.set_defaults(func=cmd_density)

    sp = sub.add_parser("inequality", help="interpolation inequality checks")
    common(sp, fmt=("json",))
    sp.add_argument("check", choices=("phi-lemma", "gineq", "cell", "main", "sample"))
    sp.add_argument("-M", type=int, default=12, help="dyadic depth for gineq")
    sp.add_argument("--grid", type=int, default=10_000)
    sp.add_argument("-t")
    sp.add_argument("--A", help="cell, or ';'-separated cells for main")
    sp.add_argument("--B", help="cell, or ';'-separated cells for main")
    sp.add_argument("--configs", type=int, default=200)
    sp.add_argument("--approx", action="store_true")
    sp.set_defaults(func=cmd_inequality)

    sp = sub.add_parser("verify", help="compare the closed forms with BFS on the level-m graph")
    common(sp)
    sp.add_argument("-m", type=int, default=3, help="graph level")
    sp.add_argument("--no-counts", action="store_true", help="compare distances only")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GasketError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
