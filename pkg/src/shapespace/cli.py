"""Command-line interface.

Exit status is 0 on success, 1 on invalid input and 2 on numerical failure
(including failed self-test suites).
"""

import argparse
import json
import logging
import sys

import numpy as np

from . import heisenberg as hz
from . import io
from .bundles import (
    horizontal_project,
    normal_project,
    quotient_inner,
    gauge_inner,
    section_tangent_project,
    tangential_component,
    vertical_field,
)
from .curves import ROTATION_SECTIONS, SCALE_SECTIONS, TRANSLATION_SECTIONS
from .elastic import ElasticParams, elastic_inner, elastic_norm
from .errors import NumericalError, OptimizerAbort, ValidationError
from .optimize import OptimizerConfig, init_path, straighten
from .paths import MetricChoice, path_report

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_INVALID)


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a finite number > 0, got {text}")
    return v


def _count(minimum):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {v}")
        return v

    return parse


def _add_closedness(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--closed", dest="closed", action="store_const", const=True, default=None,
                   help="treat input curves as closed (overrides the sidecar)")
    g.add_argument("--open", dest="closed", action="store_const", const=False,
                   help="treat input curves as open (overrides the sidecar)")


def _add_ab(p):
    p.add_argument("--a", type=_positive, default=1.0, help="tangential (stretching) weight")
    p.add_argument("--b", type=_positive, default=1.0, help="normal (bending) weight")


def _emit_json(obj, path=None):
    text = json.dumps(obj, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_heisenberg_verify(args):
    from .selftest import run_suites

    results = run_suites([1, 2, 3], echo=print)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def cmd_heisenberg_lift(args):
    K = args.samples
    if args.loop == "circle":
        loop = hz.circle_loop(K, args.radius, args.clockwise)
    else:
        # square of side 2r traversed from (r, -r), samples spread evenly over the perimeter
        r = args.radius
        corners = np.array([[r, -r], [r, r], [-r, r], [-r, -r], [r, -r]])
        if args.clockwise:
            corners = corners[::-1]
        s = np.linspace(0.0, 4.0, K + 1)
        loop = np.column_stack([np.interp(s, np.arange(5), corners[:, i]) for i in range(2)])
        loop[-1] = loop[0]
    lift = hz.horizontal_lift(loop, args.z0)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("k,x,y,z\n")
        for k, (x, y, z) in enumerate(lift.points):
            out.write(f"{k},{io.fmt(x)},{io.fmt(y)},{io.fmt(z)}\n")
    finally:
        if args.out:
            out.close()
    dz = lift.points[-1, 2] - lift.points[0, 2]
    print(f"dz={io.fmt(dz)} shoelace_area={io.fmt(hz.shoelace_area(loop))}", file=sys.stderr)
    return EXIT_OK


def cmd_normalize(args):
    curve = io.read_curve(args.curve, args.closed)
    if args.translation != "none":
        curve = TRANSLATION_SECTIONS[args.translation](curve)
    if args.rotation != "none":
        curve = ROTATION_SECTIONS[args.rotation](curve)
    if args.scale != "none":
        curve = SCALE_SECTIONS[args.scale](curve)
    if args.out:
        io.write_curve(args.out, curve)
    else:
        print("x,y")
        for x, y in curve.points:
            print(f"{io.fmt(x)},{io.fmt(y)}")
    return EXIT_OK


_INNERS = {"elastic": elastic_inner, "quotient": quotient_inner, "gauge": gauge_inner}


def cmd_inner(args):
    curve = io.read_curve(args.curve, args.closed)
    p = ElasticParams(args.a, args.b)
    h1 = io.read_field(args.field1, curve)
    h2 = io.read_field(args.field2, curve) if args.field2 else h1
    inner = _INNERS[args.metric]
    report = {
        "metric": args.metric,
        "a": p.a,
        "b": p.b,
        "inner": inner(curve, h1, h2, p),
        "norm1": float(np.sqrt(max(inner(curve, h1, h1, p), 0.0))),
        "norm2": float(np.sqrt(max(inner(curve, h2, h2, p), 0.0))),
    }
    _emit_json(report)
    return EXIT_OK


def _orthogonality(curve, v, w, p):
    nv, nw = elastic_norm(curve, v, p), elastic_norm(curve, w, p)
    if nv == 0.0 or nw == 0.0:
        return 0.0
    return abs(elastic_inner(curve, v, w, p)) / (nv * nw)


def cmd_project(args):
    curve = io.read_curve(args.curve, args.closed)
    p = ElasticParams(args.a, args.b)
    h = io.read_field(args.field, curve)
    residual = None
    if args.bundle in ("vertical", "horizontal"):
        m, w = horizontal_project(curve, h, p)
        v = vertical_field(curve, m)
    elif args.bundle == "normal":
        w = normal_project(curve, h)
        v = vertical_field(curve, tangential_component(curve, h))
    else:
        m, w, residual = section_tangent_project(curve, h)
        v = vertical_field(curve, m)
    if residual is None:
        hn = float(np.linalg.norm(h.vectors))
        residual = float(np.linalg.norm(v.vectors + w.vectors - h.vectors)) / (hn if hn else 1.0)
    out = v if args.bundle == "vertical" else w
    if args.out:
        io.write_field(args.out, out)
    else:
        print("hx,hy")
        for x, y in out.vectors:
            print(f"{io.fmt(x)},{io.fmt(y)}")
    report = {
        "bundle": args.bundle,
        "m_norm": elastic_norm(curve, v, p),
        "w_norm": elastic_norm(curve, w, p),
        "orthogonality": _orthogonality(curve, v, w, p),
        "residual": float(residual),
    }
    if args.report or args.out:
        _emit_json(report, args.report)
    else:
        # the field already occupies stdout
        print(json.dumps(report), file=sys.stderr)
    return EXIT_OK


def cmd_pathlen(args):
    path = io.read_path(args.path)
    report = path_report(path, MetricChoice(args.metric, ElasticParams(args.a, args.b)))
    _emit_json(report, args.out)
    return EXIT_OK


def cmd_geodesic(args):
    F0 = io.read_curve(args.start, args.closed)
    F1 = io.read_curve(args.end, args.closed)
    path = init_path(F0, F1, args.k)
    cfg = OptimizerConfig(max_iters=args.iters, reparam_every=args.reparam_every)
    choice = MetricChoice(args.metric, ElasticParams(args.a, args.b))
    try:
        out, trace = straighten(path, choice, cfg)
    except OptimizerAbort as exc:
        if args.trace and exc.trace is not None:
            io.write_trace(args.trace, exc.trace)
        raise
    if args.trace:
        io.write_trace(args.trace, trace)
    if args.out:
        io.write_path(args.out, out)
    else:
        print(json.dumps(io.path_to_record(out)))
    print(
        f"status={trace.status} iterations={len(trace.energy) - 1} "
        f"energy={io.fmt(trace.energy[0])}->{io.fmt(trace.final_energy)}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_selftest(args):
    from .selftest import run_suites

    numbers = args.suite or None
    results = run_suites(numbers, echo=print if args.verbose else None)
    width = max(len(r.title) for r in results)
    print(f"{'#':>2}  {'suite':<{width}}  {'result':<6}  {'checks':>6}  {'seconds':>8}")
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        n_ok = sum(c.passed for c in r.checks)
        print(f"{r.number:>2}  {r.title:<{width}}  {status:<6}  {n_ok:>3}/{len(r.checks):<2}  {r.seconds:>8.2f}")
        for c in r.checks:
            if not c.passed:
                print(f"      failed: {c.name} [{c.detail}]")
    total = sum(r.seconds for r in results)
    ok = all(r.passed for r in results)
    print(f"{'all suites PASS' if ok else 'some suites FAILED'} in {total:.1f}s")
    return EXIT_OK if ok else EXIT_NUMERIC


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser():
    parser = _Parser(prog="shapespace", description="Elastic shape analysis of planar curves.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    hp = sub.add_parser("heisenberg", help="Heisenberg toy bundle")
    hsub = hp.add_subparsers(dest="action", required=True, parser_class=_Parser)
    hv = hsub.add_parser("verify", help="run the Heisenberg suites and print a pass/fail table")
    hv.set_defaults(func=cmd_heisenberg_verify)
    hl = hsub.add_parser("lift", help="horizontal lift of a closed planar loop as CSV k,x,y,z")
    hl.add_argument("--loop", choices=("circle", "square"), default="circle")
    hl.add_argument("--samples", type=_count(3), default=512, help="number of intervals K")
    hl.add_argument("--radius", type=_positive, default=1.0)
    hl.add_argument("--clockwise", action="store_true")
    hl.add_argument("--z0", type=float, default=0.0, help="starting height")
    hl.add_argument("--out", help="CSV destination (default stdout)")
    hl.set_defaults(func=cmd_heisenberg_lift)

    np_ = sub.add_parser("normalize", help="apply translation, rotation and scale sections")
    np_.add_argument("curve", help="curve CSV (x,y)")
    np_.add_argument("--translation", choices=("centroid", "start", "none"), default="none")
    np_.add_argument("--rotation", choices=("ellipse", "tangent", "none"), default="none")
    np_.add_argument("--scale", choices=("length", "area", "none"), default="none")
    np_.add_argument("--out", help="curve CSV destination; a JSON sidecar is written next to it")
    _add_closedness(np_)
    np_.set_defaults(func=cmd_normalize)

    ip = sub.add_parser("inner", help="inner product of two tangent fields on a curve")
    ip.add_argument("curve")
    ip.add_argument("field1", help="tangent field CSV (hx,hy)")
    ip.add_argument("field2", nargs="?", help="second field (default: field1)")
    ip.add_argument("--metric", choices=tuple(_INNERS), default="elastic")
    _add_ab(ip)
    _add_closedness(ip)
    ip.set_defaults(func=cmd_inner)

    pp = sub.add_parser("project", help="split a tangent field along a bundle")
    pp.add_argument("curve")
    pp.add_argument("field")
    pp.add_argument("--bundle", choices=("vertical", "normal", "horizontal", "section"), required=True)
    pp.add_argument("--out", help="projected field CSV (default stdout)")
    pp.add_argument("--report", help="JSON report destination (default stdout, or stderr when the field goes to stdout)")
    _add_ab(pp)
    _add_closedness(pp)
    pp.set_defaults(func=cmd_project)

    lp = sub.add_parser("pathlen", help="energy and length of a curve path")
    lp.add_argument("path", help="path JSON record")
    lp.add_argument("--metric", default="gauge", help="ambient, quotient, section or gauge")
    lp.add_argument("--out", help="JSON report destination (default stdout)")
    _add_ab(lp)
    lp.set_defaults(func=cmd_pathlen)

    gp = sub.add_parser("geodesic", help="path straightening between two curves")
    gp.add_argument("start", help="curve CSV at t=0")
    gp.add_argument("end", help="curve CSV at t=1")
    gp.add_argument("--metric", default="gauge", help="ambient, quotient, section or gauge")
    gp.add_argument("--k", type=_count(2), default=16, help="time intervals K")
    gp.add_argument("--iters", type=_count(0), default=500)
    gp.add_argument("--reparam-every", type=_count(0), default=0)
    gp.add_argument("--trace", help="trace CSV destination")
    gp.add_argument("--out", help="path JSON destination (default stdout)")
    _add_ab(gp)
    _add_closedness(gp)
    gp.set_defaults(func=cmd_geodesic)

    sp = sub.add_parser("selftest", help="run acceptance suites 1-9 and print a summary table")
    sp.add_argument("--suite", type=int, action="append", choices=range(1, 10),
                    help="run only this suite (repeatable)")
    sp.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
