"""Command line front end for the built-in models.

Every run prints a JSON report on stdout::

    {"problem", "mode", "alpha", "params", "result",
     "stats": {"nodes", "failures", "wall_ms"}, "artifacts": [paths]}

CSV schemas: plan ``unit,k,start,end``; CDF plot data ``x,f_emp,f_ref,lo,hi``.
Exit codes: 0 done, 1 unsatisfiable, 2 limit exceeded, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .constraints import EQ_MODES, KsOptions, check_ground_ttest
from .models import (
    MEAN_SAMPLE,
    KS_REFERENCE,
    KS_ACCEPTED_EXAMPLE,
    KS_REJECTED_EXAMPLE,
    InspectionParams,
    build_inspection_model,
    build_ks_sets_model,
    build_ttest_mean_model,
    cdf_csv,
    check_plan,
    emit_cdf_plot_data,
    ground_enumerate_ks_sets,
    plan_csv,
)
from .solver import (
    LimitExceeded,
    SearchConfig,
    SearchStats,
    Status,
    enumerate_solutions,
    propagate_fixpoint,
    solve,
)
from .stats import (
    ExponentialCdf,
    Relation,
    ks_one_sample,
    ks_two_sample,
    ks_verdict,
    mean_feasible_interval,
    t_one_sample,
    t_pvalue,
)

EXIT_OK, EXIT_UNSAT, EXIT_LIMIT, EXIT_USAGE = 0, 1, 2, 64
MODES = ("propagate", "enumerate", "solve")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Outcome:
    def __init__(self, result: dict, code: int = EXIT_OK, stats: SearchStats | None = None):
        self.result = result
        self.code = code
        self.stats = stats or SearchStats()
        self.artifacts: list[str] = []
        self.csv: str | None = None


def _probability(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return v


def _positive(kind):
    def parse(text):
        try:
            v = kind(text)
        except (ValueError, ZeroDivisionError):
            raise argparse.ArgumentTypeError(f"invalid value: {text!r}")
        if v <= 0:
            raise argparse.ArgumentTypeError("must be positive")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="statcp", description="Statistical constraint models.")
    sub = parser.add_subparsers(dest="problem", required=True, parser_class=_Parser)

    def common(p, default_alpha, default_mode):
        p.add_argument("--alpha", type=_probability, default=default_alpha)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", type=Path, help="write the CSV (or JSON) output here")
        p.add_argument("--seed", type=int, help="shuffle value order during search")
        p.add_argument("--mode", choices=MODES, default=default_mode)
        p.add_argument("--time-limit", type=_positive(float), help="seconds")
        p.add_argument("--node-limit", type=_positive(int))

    def ks_flags(p):
        p.add_argument("--sup", choices=("exact", "pointwise", "reference"), default="exact")
        p.add_argument("--eq-mode", choices=EQ_MODES, default="two_tailed")
        p.add_argument("--small-sample", action="store_true",
                       help="apply the small-sample correction to the KS statistic")
        p.add_argument("--plot-out", type=Path, help="write CDF plot data (CSV) here")

    p = sub.add_parser("ttest-mean", help="likely values of a population mean")
    common(p, 0.05, "propagate")
    p.add_argument("--relation", choices=[r.value for r in Relation], default="=")

    p = sub.add_parser("ks-sets", help="samples compatible with a reference sample")
    common(p, 0.05, "enumerate")
    ks_flags(p)
    p.add_argument("--plot-sample", choices=("feasible", "infeasible"), default="feasible",
                   help="which illustrative sample the CDF plot data describes")

    p = sub.add_parser("inspect", help="inspection scheduling")
    common(p, None, "solve")
    ks_flags(p)
    defaults = InspectionParams()
    p.add_argument("--units", type=_positive(int), default=defaults.units)
    p.add_argument("--inspections", type=_positive(int), default=defaults.inspections)
    p.add_argument("--horizon", type=_positive(int), default=defaults.horizon)
    p.add_argument("--duration", type=_positive(int), default=defaults.duration)
    p.add_argument("--max-gap", type=_positive(int), default=defaults.max_gap)
    p.add_argument("--demand", type=_positive(int), default=defaults.demand)
    p.add_argument("--capacity", type=int, default=defaults.capacity)
    p.add_argument("--rate", type=_positive(Fraction), default=defaults.rate)
    p.add_argument("--solution-limit", type=_positive(int))
    return parser


def _search_config(args, **extra) -> SearchConfig:
    return SearchConfig(seed=args.seed, time_limit=args.time_limit,
                        node_limit=args.node_limit, **extra)


def _ks_options(args) -> KsOptions:
    return KsOptions(sup=args.sup, eq_mode=args.eq_mode, small_sample=args.small_sample)


# -- problems -------------------------------------------------------------------------


def _run_ttest(args) -> _Outcome:
    built = build_ttest_mean_model(args.alpha, relation=args.relation)
    model, m = built.model, built.mean
    stats = SearchStats()
    lo, hi = model.domain(m).min, model.domain(m).max
    relation = Relation.parse(args.relation)
    if args.mode == "propagate":
        t0 = time.perf_counter()
        status = propagate_fixpoint(model)
        stats.wall_time = time.perf_counter() - t0
        if status is Status.FAILED:
            return _Outcome({"m_domain": []}, EXIT_UNSAT, stats)
        domain = list(model.domain(m))
    elif args.mode == "enumerate":
        t0 = time.perf_counter()
        domain = [v for v in range(lo, hi + 1)
                  if check_ground_ttest(MEAN_SAMPLE, v, args.alpha, relation)]
        stats.wall_time = time.perf_counter() - t0
        stats.solutions = len(domain)
    else:
        values: list[int] = []
        enumerate_solutions(model, _search_config(args, decision_vars=[m]),
                            lambda s: values.append(s[m]), stats)
        domain = sorted(values)
    interval = mean_feasible_interval(MEAN_SAMPLE, args.alpha, relation)
    rows = []
    for v in range(lo, hi + 1):
        t = t_one_sample(MEAN_SAMPLE, v)
        p_value = t_pvalue(t, len(MEAN_SAMPLE) - 1, relation)
        rows.append({"m": v, "t": round(t, 12), "p_value": round(p_value, 12),
                     "feasible": v in domain})
    result = {"m_domain": domain, "mean_interval": [_num(x) for x in interval],
              "diagnostics": rows}
    out = _Outcome(result, EXIT_OK if domain else EXIT_UNSAT, stats)
    out.csv = "m,t,p_value,feasible\n" + "".join(
        f"{r['m']},{r['t']:.10g},{r['p_value']:.10g},{int(r['feasible'])}\n" for r in rows)
    return out


def _run_ks_sets(args) -> _Outcome:
    options = _ks_options(args)
    stats = SearchStats()
    if args.mode == "enumerate":
        t0 = time.perf_counter()
        total, rejected = ground_enumerate_ks_sets(args.alpha, options)
        stats.wall_time = time.perf_counter() - t0
        stats.solutions = total - rejected
        result = {"total": total, "rejected": rejected, "feasible": total - rejected}
        code = EXIT_OK
    else:
        built = build_ks_sets_model(args.alpha, options)
        if args.mode == "propagate":
            t0 = time.perf_counter()
            status = propagate_fixpoint(built.model)
            stats.wall_time = time.perf_counter() - t0
            if status is Status.FAILED:
                result, code = {"domains": None}, EXIT_UNSAT
            else:
                result = {"domains": {built.model.names[v]: list(built.model.domain(v))
                                      for v in built.sample2}}
                code = EXIT_OK
        else:
            total = 3 ** 8
            feasible = enumerate_solutions(built.model, _search_config(args), stats=stats)
            result = {"total": total, "rejected": total - feasible, "feasible": feasible}
            code = EXIT_OK if feasible else EXIT_UNSAT
    checks = {}
    for label, sample in (("feasible", KS_ACCEPTED_EXAMPLE), ("infeasible", KS_REJECTED_EXAMPLE)):
        stat = ks_two_sample(KS_REFERENCE, sample, sup=options.sup)
        n_eff = 5.0 if options.small_sample else None
        verdict = ks_verdict(stat.d, args.alpha, n_eff)
        checks[label] = {"sample": list(sample), "d_plus": round(stat.d_plus, 12),
                         "d_minus": round(stat.d_minus, 12),
                         "p_value": round(verdict.p_value, 12), "reject": verdict.reject}
    result["illustrations"] = checks
    result["options"] = {"sup": options.sup, "eq_mode": options.eq_mode,
                         "small_sample": options.small_sample}
    out = _Outcome(result, code, stats)
    sample = KS_ACCEPTED_EXAMPLE if args.plot_sample == "feasible" else KS_REJECTED_EXAMPLE
    out.csv = cdf_csv(emit_cdf_plot_data(sample, list(KS_REFERENCE), args.alpha))
    return out


def _run_inspect(args) -> _Outcome:
    try:
        params = InspectionParams(
            units=args.units, inspections=args.inspections, horizon=args.horizon,
            duration=args.duration, max_gap=args.max_gap, demand=args.demand,
            capacity=args.capacity, rate=args.rate,
            alpha=args.alpha if args.alpha is not None else InspectionParams.alpha)
    except ValueError as exc:
        raise UsageError(str(exc))
    args.alpha = params.alpha
    built = build_inspection_model(params, _ks_options(args))
    model = built.model
    stats = SearchStats()
    if args.mode == "propagate":
        t0 = time.perf_counter()
        status = propagate_fixpoint(model)
        stats.wall_time = time.perf_counter() - t0
        if status is Status.FAILED:
            return _Outcome({"status": "unsatisfiable"}, EXIT_UNSAT, stats)
        bounds = {model.names[v]: [model.min(v), model.max(v)]
                  for row in built.starts for v in row}
        return _Outcome({"status": "fixpoint", "start_bounds": bounds}, EXIT_OK, stats)
    if args.mode == "enumerate":
        if not (args.solution_limit or args.time_limit or args.node_limit):
            raise UsageError("inspect --mode enumerate needs --solution-limit, "
                             "--time-limit or --node-limit")
        config = built.search_config(seed=args.seed, time_limit=args.time_limit,
                                     node_limit=args.node_limit,
                                     solution_limit=args.solution_limit)
        count = enumerate_solutions(model, config, stats=stats)
        return _Outcome({"solutions": count, "complete": stats.exhausted}, EXIT_OK, stats)
    config = built.search_config(seed=args.seed, time_limit=args.time_limit,
                                 node_limit=args.node_limit)
    solution = solve(model, config, stats)
    if solution is None:
        return _Outcome({"status": "unsatisfiable"}, EXIT_UNSAT, stats)
    plan = built.plan(solution)
    ok, violations = check_plan(plan, params, sup=args.sup if args.sup != "reference" else "exact")
    target = ExponentialCdf(float(params.rate))
    units = []
    for u, gaps in enumerate(plan.intervals, 1):
        stat = ks_one_sample(gaps, target)
        verdict = ks_verdict(stat.d, params.alpha)
        units.append({"unit": u, "starts": plan.starts[u - 1], "intervals": gaps,
                      "d_plus": round(stat.d_plus, 12), "d_minus": round(stat.d_minus, 12),
                      "p_value": round(verdict.p_value, 12)})
    result = {"status": "solved", "valid": ok, "violations": violations, "units": units}
    out = _Outcome(result, EXIT_OK, stats)
    out.csv = plan_csv(plan)
    out.plot = cdf_csv(emit_cdf_plot_data(plan.intervals[0], target, params.alpha,
                                          grid_points=50))
    return out


def _num(x: float):
    return x if x == x and abs(x) != float("inf") else str(x)


RUNNERS = {"ttest-mean": _run_ttest, "ks-sets": _run_ks_sets, "inspect": _run_inspect}


def _params(args) -> dict:
    skip = {"problem", "mode", "alpha", "format", "out", "plot_out"}
    return {k: (str(v) if isinstance(v, (Fraction, Path)) else v)
            for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        outcome = RUNNERS[args.problem](args)
    except UsageError as exc:
        print(f"statcp {args.problem}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LimitExceeded as exc:
        outcome = _Outcome({"status": "limit", "reason": exc.reason,
                            "solutions_so_far": exc.count}, EXIT_LIMIT)

    plot = getattr(outcome, "plot", None)
    if plot is None and args.problem == "ks-sets":
        plot = outcome.csv
    if getattr(args, "plot_out", None) and plot is not None:
        args.plot_out.write_text(plot)
        outcome.artifacts.append(str(args.plot_out))

    csv_text = outcome.csv
    if args.format == "csv" and csv_text is not None:
        if args.out is None:
            sys.stdout.write(csv_text)
            return outcome.code
        args.out.write_text(csv_text)
        outcome.artifacts.append(str(args.out))

    report = {
        "problem": args.problem,
        "mode": args.mode,
        "alpha": args.alpha,
        "params": _params(args),
        "result": outcome.result,
        "stats": outcome.stats.as_dict(),
        "artifacts": outcome.artifacts,
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.format == "json" and args.out is not None:
        args.out.write_text(text)
    sys.stdout.write(text)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
