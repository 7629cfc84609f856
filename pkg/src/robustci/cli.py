"""Command-line interface.

Subcommands: ci-binom, ci-poisson, estimate, er-estimate, simulate,
adversary-check.  Count data is read as whitespace-separated integers from
a file argument or standard input ("-").
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import adversary
from .binomial import RobustCIConfig, robust_ci
from .dist import SampleSet, binomial_finite_pmf, poisson_finite_pmf, tv_distance
from .ergraph import SubsetSearchConfig, er_conservative_ci, er_estimate, read_edge_list
from .estimators import EstimatorConfig, adaptive_estimator
from .harness import ExperimentConfig, emit_csv, run_experiment
from .poisson import robust_ci_pois


def _read_samples(path: str) -> SampleSet:
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path) as fh:
            text = fh.read()
    values = [int(tok) for tok in text.split()]
    if not values:
        raise SystemExit("no observations found in input")
    return SampleSet(np.array(values))


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--warn-threshold", type=float, default=0.1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robustci")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ci-binom", help="robust binomial proportion CI")
    p.add_argument("data", nargs="?", default="-")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps-max", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("ci-poisson", help="robust Poisson rate CI")
    p.add_argument("data", nargs="?", default="-")
    p.add_argument("--eps-max", type=float, required=True)
    _add_common(p)

    p = sub.add_parser("estimate", help="adaptive proportion estimate")
    p.add_argument("data", nargs="?", default="-")
    p.add_argument("--m", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("er-estimate", help="robust edge-probability estimate")
    p.add_argument("edges", help="edge-list file, one 'i j' pair per line")
    p.add_argument("--n", type=int, required=True, help="node count")
    p.add_argument("--exact-limit", type=int, default=14)
    p.add_argument("--heuristic", action="store_true")
    p.add_argument("--ci", action="store_true",
                   help="append the conservative CI endpoints")
    _add_common(p)

    p = sub.add_parser("simulate", help="Monte Carlo coverage/length study")
    p.add_argument("--config", help="JSON file mirroring ExperimentConfig")
    p.add_argument("--method")
    p.add_argument("--m", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--n-nodes", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--eps-max", type=float)
    p.add_argument("--q-strategy", default=None)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--exact-limit", type=int)
    p.add_argument("--out", help="CSV path (stdout when omitted)")
    p.add_argument("--timings", action="store_true",
                   help="emit measured wallclock (may break byte-reproducibility)")
    _add_common(p)

    p = sub.add_parser("adversary-check",
                       help="construct least-favorable contamination pairs")
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--eps-max", type=float)
    p.add_argument("--n", type=int)
    _add_common(p)

    return ap


def _cmd_ci_binom(args) -> int:
    s = _read_samples(args.data)
    cfg = RobustCIConfig(args.m, args.alpha, args.eps_max, s.n,
                         args.warn_threshold)
    ci = robust_ci(s, cfg)
    print(f"{ci.lower:.17g} {ci.upper:.17g}")
    return 0


def _cmd_ci_poisson(args) -> int:
    s = _read_samples(args.data)
    ci = robust_ci_pois(s, args.alpha, args.eps_max, args.warn_threshold)
    print(f"{ci.lower:.17g} {ci.upper:.17g}")
    return 0


def _cmd_estimate(args) -> int:
    s = _read_samples(args.data)
    print(f"{adaptive_estimator(s, EstimatorConfig(args.m, args.alpha)):.17g}")
    return 0


def _cmd_er_estimate(args) -> int:
    a = read_edge_list(args.edges, args.n)
    cfg = SubsetSearchConfig(exact_limit=args.exact_limit,
                             heuristic=args.heuristic)
    p_hat = er_estimate(a, cfg)
    if args.ci:
        ci = er_conservative_ci(a, args.alpha, cfg=cfg)
        print(f"{p_hat:.17g} {ci.lower:.17g} {ci.upper:.17g}")
    else:
        print(f"{p_hat:.17g}")
    return 0


_SIM_OVERRIDES = ("method", "m", "lam", "n", "n_nodes", "p", "eps", "eps_max",
                  "q_strategy", "alpha", "seed", "exact_limit",
                  "warn_threshold")


def _cmd_simulate(args) -> int:
    fields: dict = {}
    if args.config:
        with open(args.config) as fh:
            fields.update(json.load(fh))
    for name in _SIM_OVERRIDES:
        value = getattr(args, name, None)
        if value is not None:
            fields[name] = value
    if args.reps is not None:
        fields["replications"] = args.reps
    fields.setdefault("eps", 0.0)
    fields.setdefault("seed", 0)
    fields.setdefault("n", 0 if fields.get("method") == "er-conservative" else None)
    try:
        cfg = ExperimentConfig(**fields)
    except TypeError as exc:
        raise SystemExit(f"bad configuration: {exc}") from None
    record = run_experiment(cfg)
    if args.out:
        emit_csv([record], args.out, include_wallclock=args.timings)
    else:
        from .harness import CSV_HEADER, record_row
        print(CSV_HEADER)
        print(record_row(record, include_wallclock=args.timings))
    return 0


def _report_construction(name: str, result) -> None:
    if result.feasible:
        print(f"{name} feasible min_entry={result.min_entry:.6g}")
    else:
        print(f"{name} infeasible min_entry={result.min_entry:.6g} "
              f"at={result.min_index} reason={result.reason}")


def _cmd_adversary_check(args) -> int:
    binom = args.p is not None and args.m is not None
    pois = args.lam is not None
    if binom == pois:
        raise SystemExit("give either --m/--p (binomial) or --lambda (Poisson)")
    if binom:
        if args.eps is not None and args.p + args.r <= 1.0:
            res = adversary.q1_exact_match(args.p, args.r, args.eps, args.m)
            _report_construction("q1", res)
            if res.feasible:
                mix = adversary.ContaminatedMixture(
                    binomial_finite_pmf(args.m, args.p), args.eps, res.pmf)
                target = binomial_finite_pmf(args.m, args.p + args.r)
                print(f"q1 mixture_tv={tv_distance(mix.mixture_pmf(), target):.3e}")
        if args.eps_max is not None and args.p - args.r >= 0.0:
            res = adversary.q0_exact_match(args.p, args.r, args.eps_max, args.m)
            _report_construction("q0", res)
            if args.n is not None:
                res = adversary.q0_truncated(args.p, args.r, args.eps_max,
                                             args.m, args.n, args.alpha)
                _report_construction("q0-truncated", res)
                if res.feasible:
                    mix = adversary.ContaminatedMixture(
                        binomial_finite_pmf(args.m, args.p - args.r),
                        args.eps_max, res.pmf)
                    target = binomial_finite_pmf(args.m, args.p)
                    tv = tv_distance(mix.mixture_pmf(), target)
                    print(f"q0-truncated tv={tv:.3e} "
                          f"n_tv={adversary.tv_product_bound(tv, args.n):.3e}")
    else:
        if args.eps is not None:
            res = adversary.pois_q1_exact(args.lam, args.r, args.eps)
            _report_construction("q1", res)
        if args.eps_max is not None and args.lam - args.r >= 0.0:
            res = adversary.pois_q0_exact(args.lam, args.r, args.eps_max)
            _report_construction("q0", res)
    return 0


_COMMANDS = {
    "ci-binom": _cmd_ci_binom,
    "ci-poisson": _cmd_ci_poisson,
    "estimate": _cmd_estimate,
    "er-estimate": _cmd_er_estimate,
    "simulate": _cmd_simulate,
    "adversary-check": _cmd_adversary_check,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
