"""Command line front end.

Exit codes: 0 success or no violation, 1 violation or bound exceeded,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

from . import bounds, smoothness
from .model import InstanceError, load_instance, serialize
from .offline import SearchSpaceTooLarge, empirical_ratio
from .online import TieBreakPolicy
from .search import SearchConfig, run_search

BOUNDS_COLUMNS = (
    "d",
    "psi",
    "xi",
    "mu",
    "log10_lambda",
    "log10_upper_unweighted",
    "log10_upper_weighted_psi",
    "log10_upper_weighted_closed",
)


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _emit(text: str, path: str | None, stdout) -> None:
    if path is None:
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def bounds_table(d_min: int, d_max: int) -> str:
    if not 1 <= d_min <= d_max <= 200:
        raise UsageError("need 1 <= d-min <= d-max <= 200")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BOUNDS_COLUMNS)
    for d in range(d_min, d_max + 1):
        rep = bounds.bound_report(d)
        w.writerow(_fmt(v) for v in (
            d, rep.psi, rep.xi, rep.mu_unweighted, rep.lambda_unweighted,
            rep.upper_unweighted, rep.upper_weighted_psi, rep.upper_weighted_closed,
        ))
    return buf.getvalue()


def cmd_bounds(args, stdout) -> int:
    _emit(bounds_table(args.d_min, args.d_max), args.out, stdout)
    return 0


def cmd_simulate(args, stdout) -> int:
    try:
        inst = load_instance(args.instance)
    except OSError as exc:
        raise UsageError(f"cannot read {args.instance}: {exc.strerror}") from None
    except InstanceError as exc:
        raise UsageError(f"{args.instance}: {exc}") from None
    try:
        res = empirical_ratio(inst, TieBreakPolicy(args.tiebreak), exact=args.exact)
    except SearchSpaceTooLarge as exc:
        raise UsageError(str(exc)) from None
    weighted = not inst.unweighted
    d = inst.max_degree
    log_bound = bounds.theoretical_bound(d, weighted)
    bound = bounds.materialize(log_bound)
    if res.ratio is None:
        within = False
    else:
        within = bound is None or res.ratio <= bound * (1 + 1e-9)
    lines = [
        f"ALG {res.alg!r}",
        f"OPT {res.opt!r}",
        f"ratio {_fmt(res.ratio) or 'undefined'}",
        f"max_degree {d}",
        f"weighted {str(weighted).lower()}",
        f"bound {_fmt(bound) or 'overflow'}",
        f"log10_bound {log_bound!r}",
        f"within_bound {str(within).lower()}",
    ]
    stdout.write("\n".join(lines) + "\n")
    if args.out:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("alg", "opt", "ratio", "max_degree", "weighted", "log10_bound", "within_bound"))
        w.writerow((repr(res.alg), repr(res.opt), _fmt(res.ratio), d, int(weighted), repr(log_bound), int(within)))
        _emit(buf.getvalue(), args.out, stdout)
    return 0 if within else 1


def _d_range(args, default: tuple[int, int], minimum: int) -> range:
    if args.d is not None:
        lo = hi = args.d
    else:
        lo = args.d_min if args.d_min is not None else default[0]
        hi = args.d_max if args.d_max is not None else default[1]
    if not minimum <= lo <= hi:
        raise UsageError(f"need {minimum} <= d-min <= d-max")
    return range(lo, hi + 1)


def verify_reports(args) -> list[smoothness.ViolationReport]:
    reports = []
    if args.kind == "unweighted":
        x_max = args.x_max if args.x_max is not None else args.grid or 50
        y_max = args.y_max if args.y_max is not None else args.grid or 50
        if x_max < 0 or y_max < 1:
            raise UsageError("need x-max >= 0 and y-max >= 1")
        for d in _d_range(args, (2, 8), 2):
            log_lam, mu = bounds.smoothness_params_unweighted(d)
            if args.lambda_override is not None:
                if args.lambda_override <= 0:
                    raise UsageError("lambda must be positive")
                log_lam = bounds.math.log10(args.lambda_override)
            if args.mu_override is not None:
                mu = args.mu_override
            reports.append(smoothness.check_unweighted_inequality(d, log_lam, mu, x_max, y_max))
    elif args.kind == "weighted":
        points = args.grid or 64
        if points < 2:
            raise UsageError("grid must be >= 2")
        grid = smoothness.default_weighted_grid(points)
        for d in _d_range(args, (1, 10), 1):
            lam, mu = smoothness.weighted_certificate(d)
            if args.lambda_override is not None:
                lam = args.lambda_override
            if args.mu_override is not None:
                mu = args.mu_override
            reports.append(smoothness.check_weighted_inequality(d, lam, mu, grid))
    elif args.kind == "g-max":
        samples = args.samples
        if samples < 10**4:
            raise UsageError("samples must be >= 10000")
        for d in _d_range(args, (1, 10), 1):
            g = smoothness.verify_g_max(d, samples=samples)
            rep = smoothness.ViolationReport("g-max", f"d={d} samples={samples}")
            v = smoothness.Violation("g-max", d, d, g.at_z, g.ratio, g.max_g, g.psi_power, g.psi_power - g.max_g)
            rep.checked_points = samples
            rep.max_slack = v.gap
            if not g.ok:
                rep.violations.append(v)
            reports.append(rep)
    else:
        grid = args.grid or 200
        if grid < 100:
            raise UsageError("grid must be >= 100 for lemma checks")
        reports.extend(smoothness.check_lemma_inequalities(grid).values())
    return reports


def cmd_verify(args, stdout) -> int:
    reports = verify_reports(args)
    _emit(smoothness.write_violations_csv(reports), args.out, stdout)
    bad = [r for r in reports if not r.ok]
    for r in reports:
        status = "ok" if r.ok else f"{len(r.violations)} violations"
        print(f"{r.kind} [{r.ranges}] checked={r.checked_points}: {status}", file=sys.stderr)
    return 1 if bad else 0


def cmd_search(args, stdout) -> int:
    try:
        cfg = SearchConfig(
            seed=args.seed,
            iterations=args.iters,
            d=args.d,
            num_resources=args.resources,
            num_requests=args.requests,
            max_allocations=args.max_allocations,
            weighted=args.weighted,
            mutation_rate=args.mutation_rate,
            policy=TieBreakPolicy(args.tiebreak),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = run_search(cfg)
    _emit(result.trace_csv(), args.trace, stdout)
    if args.out:
        _emit(serialize(result.best_instance), args.out, stdout)
    print(f"best ratio {result.best_ratio!r}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bestreply", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="CSV table of ratio constants per degree")
    b.add_argument("--d-min", type=int, default=1)
    b.add_argument("--d-max", type=int, default=10)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("simulate", help="online vs. offline cost of one instance file")
    s.add_argument("instance")
    s.add_argument("--tiebreak", choices=[t.value for t in TieBreakPolicy], default="first")
    s.add_argument("--exact", choices=["exhaustive", "bnb"], default="bnb")
    s.add_argument("--out", help="also write a one-row CSV here")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="grid-check a smoothness certificate")
    v.add_argument("kind", choices=["unweighted", "weighted", "g-max", "lemmas"])
    v.add_argument("--d", type=int)
    v.add_argument("--d-min", type=int)
    v.add_argument("--d-max", type=int)
    v.add_argument("--grid", type=int, help="x/y maximum (unweighted), points per axis (weighted), lemma grid size")
    v.add_argument("--x-max", type=int)
    v.add_argument("--y-max", type=int)
    v.add_argument("--samples", type=int, default=10**5)
    v.add_argument("--mu-override", type=float)
    v.add_argument("--lambda-override", type=float, help="plain (not log10) lambda")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("search", help="local search for a bad instance")
    q.add_argument("--d", type=int, default=1)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--iters", type=int, default=1000)
    q.add_argument("--resources", type=int, default=4)
    q.add_argument("--requests", type=int, default=3)
    q.add_argument("--max-allocations", type=int, default=2)
    q.add_argument("--weighted", action="store_true")
    q.add_argument("--mutation-rate", type=float, default=0.3)
    q.add_argument("--tiebreak", choices=[t.value for t in TieBreakPolicy], default="first")
    q.add_argument("--out", help="best instance file")
    q.add_argument("--trace", help="trace CSV (default stdout)")
    q.set_defaults(func=cmd_search)
    return p


def main(argv=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, stdout)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
