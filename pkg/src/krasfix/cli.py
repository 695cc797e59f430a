"""Command-line front end.

    krasfix fixed-point --fn "cos(x)" --domain 0 1 --x0 0 --guaranteed
    krasfix newton --fn "x^2 - 2" --domain 1.4142135624 3 --x0 3 --check-hypotheses root_below
    krasfix estimate --fn "cos(x)" --domain 0 1 --grid 1024
    krasfix fixed-points --fn "x^3" --domain -2 2

Exit codes: 0 converged, 1 usage or evaluation error, 2 diverged, 3 left the
interval, 4 iteration budget spent, 5 Newton hypotheses failed, 6 zero
derivative.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from . import engine, expr, lipschitz, newton, oracle
from .errors import DerivativeZeroError, KrasfixError, PreconditionViolation
from .model import Interval, IterationConfig, SlopeBound

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CODES = {
    "converged": 0,
    "diverged": 2,
    "exited_interval": 3,
    "budget_exhausted": 4,
}
EXIT_HYPOTHESES = 5
EXIT_DERIVATIVE_ZERO = 6

ESTIMATE_SAFETY = lipschitz.GUARANTEE_SAFETY
# half-width of the window used to estimate L when the domain is unbounded
UNBOUNDED_WINDOW = 1.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "diverged"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _number(x):
    """JSON-safe number: shortest round-trip repr; infinities as strings."""
    if isinstance(x, float) and math.isinf(x):
        return "+inf" if x > 0 else "-inf"
    return x


def _fmt(x):
    if x is None:
        return ""
    return repr(float(x))


def _records(trace):
    out = []
    for n, x in enumerate(trace.iterates):
        out.append({"n": n, "x": x, "hx": trace.values[n], "residual": trace.residual(n)})
    return out


def _emit(doc, trace, fmt, out):
    if fmt == "json":
        out.write(json.dumps(doc, indent=2) + "\n")
        return
    for key in ("config", "hypotheses"):
        if key in doc:
            out.write(f"# {key}: {json.dumps(doc[key], separators=(',', ':'))}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "x", "hx", "residual"])
    if trace is not None:
        for r in _records(trace):
            writer.writerow([r["n"], _fmt(r["x"]), _fmt(r["hx"]), _fmt(r["residual"])])
    out.write(f"# outcome: {json.dumps(doc['outcome'], separators=(',', ':'))}\n")


def _domain(args):
    if args.unbounded:
        return Interval.real_line()
    if args.domain is None:
        raise UsageError("give --domain LO HI or --unbounded")
    lo, hi = args.domain
    return Interval(lo, hi)


def _function(args, domain, derivatives=False):
    notes = []
    h = expr.to_function(args.fn, domain, derivatives=derivatives, notes=notes)
    for note in dict.fromkeys(notes):
        print(f"note: {note}", file=sys.stderr)
    return h


def _estimate_window(domain, x0):
    if domain.is_finite:
        return domain
    lo = max(domain.lo, x0 - UNBOUNDED_WINDOW)
    hi = min(domain.hi, x0 + UNBOUNDED_WINDOW)
    return Interval(lo, hi)


def cmd_fixed_point(args, out):
    domain = _domain(args)
    h = _function(args, domain)
    if not domain.contains(args.x0):
        raise UsageError(f"--x0 {args.x0} is outside the domain")
    if args.guaranteed and not domain.is_finite:
        raise UsageError("--guaranteed needs a finite --domain")

    kind = lipschitz.LOWER_ONLY if args.one_sided else lipschitz.TWO_SIDED
    if args.L is not None:
        bound = SlopeBound(args.L, kind, "user")
    elif args.t is None or args.guaranteed:
        window = _estimate_window(domain, args.x0)
        estimator = lipschitz.estimate_lower_slope if args.one_sided else lipschitz.estimate_lipschitz
        bound = estimator(h, window, args.grid).bound
    else:
        bound = None
    t = args.t if args.t is not None else engine.choose_t(bound, ESTIMATE_SAFETY)

    cfg = IterationConfig(t=t, tol=args.tol, max_iter=args.max_iter,
                          divergence_threshold=args.divergence_threshold)
    config = {
        "fn": args.fn,
        "domain": [_number(domain.lo), _number(domain.hi)],
        "x0": args.x0,
        "t": cfg.t,
        "tol": cfg.tol,
        "max_iter": cfg.max_iter,
        "divergence_threshold": cfg.divergence_threshold,
        "guaranteed": bool(args.guaranteed),
        "slope_bound": None if bound is None else {
            "kind": bound.kind, "value": bound.value, "provenance": bound.provenance},
    }
    if args.guaranteed:
        trace = engine.iterate_hillam(h, bound, args.x0, cfg)
    else:
        trace = engine.iterate(h, args.x0, cfg)
    doc = {"mode": "fixed_point", "config": config, "trace": _records(trace),
           "outcome": trace.outcome.to_dict()}
    _emit(doc, trace, args.format, out)
    return EXIT_CODES[trace.outcome.kind]


def cmd_root_newton(args, out):
    if args.domain is None:
        raise UsageError("newton needs --domain LO HI")
    domain = Interval(*args.domain)
    h = _function(args, domain, derivatives=True)
    if not domain.contains(args.x0):
        raise UsageError(f"--x0 {args.x0} is outside the domain")
    cfg = IterationConfig(tol=args.tol, max_iter=args.max_iter)
    config = {
        "fn": args.fn,
        "domain": [domain.lo, domain.hi],
        "x0": args.x0,
        "tol": cfg.tol,
        "max_iter": cfg.max_iter,
    }
    doc = {"mode": "root", "config": config}
    if args.check_hypotheses:
        report = newton.check_global_hypotheses(h, domain, args.check_hypotheses, n_grid=args.grid)
        doc["hypotheses"] = report.to_dict()
        if not report.overall and not args.force:
            doc["trace"] = []
            doc["outcome"] = {"kind": "refused", "reason": "hypotheses not satisfied"}
            _emit(doc, None, args.format, out)
            print("hypothesis check failed; rerun with --force to iterate anyway", file=sys.stderr)
            return EXIT_HYPOTHESES
    try:
        trace = newton.newton_solve(h, domain, args.x0, cfg)
    except DerivativeZeroError as exc:
        doc["trace"] = _records(exc.trace)
        doc["outcome"] = {"kind": "derivative_zero", "at": exc.x}
        _emit(doc, exc.trace, args.format, out)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DERIVATIVE_ZERO
    doc["trace"] = _records(trace)
    doc["outcome"] = trace.outcome.to_dict()
    _emit(doc, trace, args.format, out)
    return EXIT_CODES[trace.outcome.kind]


def cmd_estimate(args, out):
    domain = Interval(*args.domain)
    h = _function(args, domain)
    estimator = lipschitz.estimate_lower_slope if args.one_sided else lipschitz.estimate_lipschitz
    est = estimator(h, domain, args.grid)
    doc = est.to_dict()
    doc["recommended_t"] = engine.choose_t(est.bound, ESTIMATE_SAFETY)
    doc["safety"] = ESTIMATE_SAFETY
    out.write(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_fixed_points(args, out):
    domain = Interval(*args.domain)
    h = _function(args, domain)
    found = oracle.find_fixed_points(h, domain, args.grid)
    out.write(json.dumps(list(found.points)) + "\n")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="krasfix", description="Damped fixed-point and global Newton solvers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, domain_required=True):
        p.add_argument("--fn", required=True, help="expression in x, e.g. 'cos(x)'")
        p.add_argument("--domain", nargs=2, type=float, metavar=("LO", "HI"),
                       required=domain_required)

    fp = sub.add_parser("fixed-point", help="damped fixed-point iteration")
    common(fp, domain_required=False)
    fp.add_argument("--unbounded", action="store_true", help="iterate on the whole real line")
    fp.add_argument("--x0", type=float, required=True)
    fp.add_argument("--t", type=float, help="relaxation weight on h(x); default 0.8/(1+L)")
    fp.add_argument("--L", type=float, help="slope bound; estimated when omitted")
    fp.add_argument("--one-sided", action="store_true",
                    help="treat L as a lower slope bound (slopes >= -L)")
    fp.add_argument("--grid", type=int, default=1024, help="grid size for estimating L")
    fp.add_argument("--tol", type=float, default=1e-12)
    fp.add_argument("--max-iter", type=int, default=1000)
    fp.add_argument("--divergence-threshold", type=float, default=1e12)
    fp.add_argument("--format", choices=("json", "csv"), default="json")
    fp.add_argument("--guaranteed", action="store_true",
                    help="self-map mode: t <= 1/(1+L) enforced, must converge")
    fp.set_defaults(func=cmd_fixed_point)

    nt = sub.add_parser("newton", help="Newton-Raphson with symbolic derivatives")
    common(nt)
    nt.add_argument("--x0", type=float, required=True)
    nt.add_argument("--tol", type=float, default=1e-12)
    nt.add_argument("--max-iter", type=int, default=100)
    nt.add_argument("--check-hypotheses", choices=(newton.ROOT_ABOVE, newton.ROOT_BELOW))
    nt.add_argument("--force", action="store_true", help="iterate even if the check fails")
    nt.add_argument("--grid", type=int, default=1024, help="sample count for the check")
    nt.add_argument("--format", choices=("json", "csv"), default="json")
    nt.set_defaults(func=cmd_root_newton)

    es = sub.add_parser("estimate", help="sampled Lipschitz / lower slope bound")
    common(es)
    es.add_argument("--grid", type=int, default=1024)
    es.add_argument("--one-sided", action="store_true")
    es.set_defaults(func=cmd_estimate)

    fps = sub.add_parser("fixed-points", help="list fixed points found by grid scan")
    common(fps)
    fps.add_argument("--grid", type=int, default=4096)
    fps.set_defaults(func=cmd_fixed_points)
    return parser


def main(argv=None, out=None):
    out = out if out is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"krasfix: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except PreconditionViolation as exc:
        print(f"krasfix: guarantee violated: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except KrasfixError as exc:
        print(f"krasfix: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
