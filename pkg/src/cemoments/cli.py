"""Command-line front end.

Four subcommands: jpoly (cycle polynomials per delta pattern), moment
(entry-moment series), trace (block trace-moment series), verify (built-in
check suites, including the Monte Carlo cross-check). Results go to stdout,
diagnostics to stderr; --json switches to machine output. Worker count
comes from --workers or the CEMOMENTS_WORKERS environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import montecarlo
from .moments import cancellation_report, moment_series
from .partitions import normalize_partition
from .traces import trace_moment
from .wick import ExternalSpec, get_diagram_sum


def parse_partition(text, allow_ones=True):
    text = text.strip()
    if not text:
        return ()
    try:
        parts = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"partition must be comma-separated integers, got {text!r}"
        )
    try:
        return normalize_partition(parts, allow_ones=allow_ones)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _default_workers():
    env = os.environ.get("CEMOMENTS_WORKERS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _fraction_term(c, power):
    u_txt = "u" if power == 1 else f"u^{power}"
    mag = abs(c)
    if mag == 1:
        return u_txt
    if mag.denominator != 1:
        return f"({mag}){u_txt}"
    return f"{mag}{u_txt}"


def format_pattern_series(series, n):
    """Plain rendering like 'u + 0u^2 + 0u^3 + 0u^4', leading order first."""
    pieces = []
    for power in range(n, series.cap + 1):
        c = series.coefficient(power)
        if c == 0:
            u_txt = "u" if power == 1 else f"u^{power}"
            pieces.append(("+", f"0{u_txt}"))
        else:
            pieces.append(("-" if c < 0 else "+", _fraction_term(c, power)))
    if not pieces:
        return "0"
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def _grouped(values):
    """Collapse a pattern->text map when every pattern agrees."""
    texts = set(values.values())
    if len(texts) == 1:
        return [texts.pop()]
    return [f"pattern {list(p)}: {txt}" for p, txt in values.items()]


def cmd_jpoly(args):
    dsum = get_diagram_sum(args.beta, args.n, args.lam, workers=args.workers)
    if args.json:
        print(json.dumps(dsum.to_json()))
        return 0
    lines = _grouped({p: str(poly) for p, poly in dsum.pattern_map.items()})
    for line in lines:
        print(line)
    return 0


def cmd_moment(args):
    cap = args.cap if args.cap is not None else args.n + 3
    try:
        ms = moment_series(
            ExternalSpec(beta=args.beta, n=args.n), cap, workers=args.workers
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(ms.to_json(N=args.N)))
        return 0
    if args.N is not None:
        values = ms.evaluate_at(args.N)
        for line in _grouped({p: str(v) for p, v in values.items()}):
            print(line)
        return 0
    tail = f"; u=1/({ms.params.omega_text})"
    rendered = {
        p: format_pattern_series(s, args.n) + tail
        for p, s in ms.pattern_map.items()
    }
    for line in _grouped(rendered):
        print(line)
    return 0


def cmd_trace(args):
    mu = args.mu if args.mu is not None else args.lam
    n = sum(args.lam)
    cap = args.cap if args.cap is not None else max(4, n + 1)
    try:
        result = trace_moment(args.lam, mu, cap, workers=args.workers)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if (args.M is None) != (args.N is None):
        print("error: numeric evaluation needs both --M and --N",
              file=sys.stderr)
        return 2
    if args.M is not None:
        try:
            value = result.value_at(args.N, args.M)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    if args.json:
        data = result.to_json()
        if args.M is not None:
            data["M"] = args.M
            data["N"] = args.N
            data["value"] = str(value)
        print(json.dumps(data))
        return 0
    if args.M is not None:
        print(str(value))
        return 0
    print(result.format())
    return 0


CATALAN = {1: 1, 2: 2, 3: 5, 4: 14}


def _verify_cancellations(args, emit):
    failures = 0
    report = cancellation_report(n=1, max_rank=3, beta=1,
                                 workers=args.workers)
    for r in (1, 2, 3):
        values = report.get(r, {})
        ok = values and all(v == 0 for v in values.values())
        emit({"check": f"rank-{r} cancellation", "verdict":
              "pass" if ok else "fail"},
             f"rank {r}: weighted sum vanishes for every pattern "
             f"... {'pass' if ok else 'FAIL'}")
        if not ok:
            failures += 1
    return failures


def _verify_catalan(args, emit):
    failures = 0
    for lam in [(3,), (2, 2), (4,), (3, 2), (2, 2, 2)]:
        pm = get_diagram_sum(1, 1, lam, workers=args.workers).pattern_map
        expected_deg = sum(lam) + len(lam)
        want_lead = 1
        for part in lam:
            want_lead *= CATALAN[part]
        ok = all(
            poly.degree == expected_deg
            and poly.leading_coefficient == want_lead
            for poly in pm.values()
        )
        emit({"check": f"catalan leading coefficient {list(lam)}",
              "verdict": "pass" if ok else "fail"},
             f"lambda={list(lam)}: degree {expected_deg}, leading "
             f"{want_lead} ... {'pass' if ok else 'FAIL'}")
        if not ok:
            failures += 1
    return failures


def _verify_mc_coe(args, emit):
    failures = 0
    N, M = args.N, args.M
    cfg = montecarlo.SampleConfig(
        ensemble="COE", N=N, sample_count=args.samples,
        rng_seed=args.seed,
    )
    print(f"seed={args.seed} generator={montecarlo.GENERATOR_NAME}",
          file=sys.stderr if args.json else sys.stdout)

    ms = moment_series(ExternalSpec(beta=1, n=1), 4, workers=args.workers)
    entry_allow = sum(
        montecarlo.entry_truncation_allowance(s, N, beta=1)
        for s in ms.pattern_map.values()
    )
    values = ms.evaluate_at(N)
    diag = sum(values.values())
    offdiag = None
    if N >= 2:
        for p, v in values.items():
            if p == (0, 1):  # the straight-through pattern only
                offdiag = v

    checks = [
        ("|W[0,0]|^2", montecarlo.EntryMoment(((0, 0, False), (0, 0, True))),
         diag, entry_allow, None),
    ]
    if offdiag is not None:
        checks.append(
            ("|W[0,1]|^2",
             montecarlo.EntryMoment(((0, 1, False), (0, 1, True))),
             offdiag, entry_allow, None)
        )
    t1 = trace_moment((1,), (1,), 4, workers=args.workers)
    checks.append(
        ("|p_(1)(B)|^2", montecarlo.BlockTraceMoment((1,), (1,), M),
         t1.value_at(N, M), montecarlo.trace_truncation_allowance(t1, N, M),
         M)
    )
    t2 = trace_moment((2,), (2,), 4, workers=args.workers)
    checks.append(
        ("|p_(2)(B)|^2", montecarlo.BlockTraceMoment((2,), (2,), M),
         t2.value_at(N, M), montecarlo.trace_truncation_allowance(t2, N, M),
         M)
    )
    for name, obs, symbolic, allowance, m_used in checks:
        est = montecarlo.estimate_moment(cfg, obs, workers=args.workers)
        rep = montecarlo.compare(symbolic, est, sigma_tol=4.0,
                                 trunc_bound=allowance, observable=name,
                                 N=N, M=m_used)
        emit(rep.to_json(),
             f"{name}: mean={est.mean.real:.6f} target={float(symbolic):.6f} "
             f"stderr={est.std_error:.2e} allowance={allowance:.2e} "
             f"... {rep.verdict}")
        if not rep.passed:
            failures += 1
    return failures


def cmd_verify(args):
    def emit(obj, text):
        if args.json:
            print(json.dumps(obj))
        else:
            print(text)

    suites = {
        "cancellations": _verify_cancellations,
        "catalan": _verify_catalan,
        "mc-coe": _verify_mc_coe,
    }
    if args.suite == "all":
        to_run = list(suites.values())
    else:
        to_run = [suites[args.suite]]
    try:
        failures = sum(fn(args, emit) for fn in to_run)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not args.json:
        print("all checks passed" if failures == 0
              else f"{failures} check(s) FAILED")
    return 1 if failures else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cemoments",
        description="Exact circular-ensemble moments by diagram enumeration",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--workers", type=int, default=_default_workers(),
                       help="process count for enumeration/sampling "
                            "(default: CEMOMENTS_WORKERS or 1)")
        p.add_argument("--json", action="store_true",
                       help="machine-readable output")

    p_jpoly = sub.add_parser("jpoly", help="cycle-count polynomial in d")
    p_jpoly.add_argument("--beta", type=int, choices=(1, 2), default=1)
    p_jpoly.add_argument("--lambda", dest="lam", required=True,
                         type=lambda s: parse_partition(s, allow_ones=False),
                         help="vertex partition, comma-separated, no part 1; "
                              "empty string for the empty partition")
    p_jpoly.add_argument("--n", type=int, default=1,
                         help="external factor count (default 1)")
    add_common(p_jpoly)
    p_jpoly.set_defaults(func=cmd_jpoly)

    p_moment = sub.add_parser("moment", help="entry-moment series in u")
    p_moment.add_argument("--beta", type=int, choices=(1, 2), default=1)
    p_moment.add_argument("--n", type=int, default=1)
    p_moment.add_argument("--cap", type=int, default=None,
                          help="series truncation order (default n+3)")
    p_moment.add_argument("--N", type=int, default=None,
                          help="evaluate at this matrix size")
    add_common(p_moment)
    p_moment.set_defaults(func=cmd_moment)

    p_trace = sub.add_parser("trace",
                             help="block trace-moment series (COE)")
    p_trace.add_argument("--lambda", dest="lam", required=True,
                         type=parse_partition)
    p_trace.add_argument("--mu", type=parse_partition, default=None,
                         help="second cycle type (default: same as lambda)")
    p_trace.add_argument("--cap", type=int, default=None,
                         help="series truncation order "
                              "(default max(4, n+1))")
    p_trace.add_argument("--M", type=int, default=None)
    p_trace.add_argument("--N", type=int, default=None)
    add_common(p_trace)
    p_trace.set_defaults(func=cmd_trace)

    p_verify = sub.add_parser("verify", help="built-in check suites")
    p_verify.add_argument("suite",
                          choices=("cancellations", "catalan", "mc-coe",
                                   "all"))
    p_verify.add_argument("--N", type=int, default=8)
    p_verify.add_argument("--M", type=int, default=3)
    p_verify.add_argument("--samples", type=int, default=100000)
    p_verify.add_argument("--seed", type=int, default=12345)
    add_common(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
