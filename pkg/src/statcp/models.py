"""Built-in problem models and their independent validators.

* :func:`build_ttest_mean_model` - likely values of a mean given ten variates.
* :func:`build_ks_sets_model` - sets of variates compatible with a reference set.
* :func:`build_inspection_model` - memoryless inspection scheduling.

The validators (:func:`check_plan`, :func:`ground_enumerate_ks_sets`) only use
:mod:`statcp.stats` and plain loops, never the propagators, so they can be
used as oracles for solver output.
"""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from .constraints import KsOptions, NonParametricKs, ParametricKs, TTest
from .scheduling import Linear, cumulative
from .solver import Model, SearchConfig, Solution
from .stats import (
    EmpiricalCdf,
    ExponentialCdf,
    Relation,
    confidence_band,
    ks_one_sample,
    ks_two_sample,
    ks_verdict,
)

__all__ = [
    "MEAN_SAMPLE",
    "KS_REFERENCE",
    "KS_ACCEPTED_EXAMPLE",
    "KS_REJECTED_EXAMPLE",
    "InspectionModel",
    "InspectionParams",
    "InspectionPlan",
    "KsSetsModel",
    "MeanModel",
    "build_inspection_model",
    "build_ks_sets_model",
    "build_ttest_mean_model",
    "check_plan",
    "emit_cdf_plot_data",
    "ground_enumerate_ks_sets",
    "cdf_csv",
    "plan_csv",
]

MEAN_SAMPLE = (8, 14, 6, 12, 12, 9, 10, 9, 10, 5)
KS_REFERENCE = (9, 10, 9, 6, 11, 8, 10, 11, 14, 11)
KS_FIXED = (5, 5)
KS_CHOICES = (9, 10, 11)
KS_FREE = 8
KS_REJECTED_EXAMPLE = (5, 5, 9, 9, 9, 9, 9, 9, 9, 9)
KS_ACCEPTED_EXAMPLE = (5, 5, 9, 9, 9, 9, 9, 10, 10, 11)


# -- mean inference -------------------------------------------------------------------


@dataclass
class MeanModel:
    model: Model
    observations: list[int]
    mean: int


def build_ttest_mean_model(alpha: float = 0.05, sample: Sequence[int] = MEAN_SAMPLE,
                           mean_range: tuple[int, int] = (0, 20),
                           relation: "Relation | str" = Relation.EQ) -> MeanModel:
    model = Model()
    obs = [model.new_variable_sparse([v], name=f"o{k + 1}") for k, v in enumerate(sample)]
    mean = model.new_variable(*mean_range, name="m")
    model.add(TTest(obs, mean, alpha, relation))
    return MeanModel(model, obs, mean)


# -- feasible sample sets -------------------------------------------------------------


@dataclass
class KsSetsModel:
    model: Model
    sample1: list[int]
    sample2: list[int]
    options: KsOptions


def build_ks_sets_model(alpha: float = 0.05, options: KsOptions | None = None,
                        relation: "Relation | str" = Relation.EQ) -> KsSetsModel:
    options = options or KsOptions()
    model = Model()
    s1 = [model.new_variable_sparse([v], name=f"o{k + 1}") for k, v in enumerate(KS_REFERENCE)]
    s2 = [model.new_variable_sparse([v], name=f"o{11 + k}") for k, v in enumerate(KS_FIXED)]
    s2 += [model.new_variable_sparse(KS_CHOICES, name=f"o{13 + k}") for k in range(KS_FREE)]
    model.add(NonParametricKs(s1, s2, alpha, relation, options))
    return KsSetsModel(model, s1, s2, options)


def _ks_two_sample_rejects(v1, v2, alpha: float, options: KsOptions) -> bool:
    stat = ks_two_sample(v1, v2, sup=options.sup)
    n_eff = len(v1) * len(v2) / (len(v1) + len(v2)) if options.small_sample else None
    if options.eq_mode == "decomposed":
        level = 1.0 - (1.0 - alpha) / 2.0
        return (ks_verdict(stat.d_plus, level, n_eff).reject
                or ks_verdict(stat.d_minus, level, n_eff).reject)
    return ks_verdict(stat.d, alpha, n_eff).reject


def ground_enumerate_ks_sets(alpha: float = 0.05, options: KsOptions | None = None,
                             visitor: Callable[[tuple, bool], None] | None = None
                             ) -> tuple[int, int]:
    """Test every candidate second sample directly; returns ``(total, rejected)``."""
    options = options or KsOptions()
    total = rejected = 0
    for tail in itertools.product(KS_CHOICES, repeat=KS_FREE):
        sample = KS_FIXED + tail
        rej = _ks_two_sample_rejects(KS_REFERENCE, sample, alpha, options)
        total += 1
        rejected += rej
        if visitor is not None:
            visitor(sample, rej)
    return total, rejected


# -- inspection scheduling ----------------------------------------------------------


@dataclass(frozen=True)
class InspectionParams:
    units: int = 10
    inspections: int = 25
    horizon: int = 365
    duration: int = 1
    max_gap: int = 36
    demand: int = 1
    capacity: int = 5
    rate: Fraction = Fraction(1, 5)
    alpha: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "rate", Fraction(self.rate))
        for name in ("units", "inspections", "horizon", "duration", "max_gap", "demand"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.inspections < 2:
            raise ValueError("need at least two inspections per unit")
        if self.capacity < 0:
            raise ValueError("capacity must be non-negative")
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["rate"] = str(self.rate)
        return d


@dataclass
class InspectionPlan:
    """Per-unit inspection days; ``starts[u][k]`` is the k-th inspection of unit u."""

    starts: list[list[int]]
    ends: list[list[int]]

    @property
    def intervals(self) -> list[list[int]]:
        return [[b - a - 1 for a, b in zip(s, s[1:])] for s in self.starts]

    def rows(self):
        for u, (ss, es) in enumerate(zip(self.starts, self.ends), 1):
            for k, (s, e) in enumerate(zip(ss, es), 1):
                yield u, k, s, e


@dataclass
class InspectionModel:
    model: Model
    params: InspectionParams
    starts: list[list[int]]
    ends: list[list[int]]
    intervals: list[list[int]]
    rate: int
    options: KsOptions = field(default_factory=KsOptions)

    def decision_order(self) -> list[int]:
        """Unit by unit: the unit's intervals in order, then its first start."""
        order = []
        for u in range(self.params.units):
            order.extend(self.intervals[u])
            order.append(self.starts[u][0])
        return order

    def search_config(self, **kwargs) -> SearchConfig:
        kwargs.setdefault("var_selection", "input_order")
        return SearchConfig(decision_vars=self.decision_order(), **kwargs)

    def plan(self, solution: Solution) -> InspectionPlan:
        return InspectionPlan(
            starts=[[solution[v] for v in row] for row in self.starts],
            ends=[[solution[v] for v in row] for row in self.ends],
        )


def build_inspection_model(params: InspectionParams | None = None,
                           options: KsOptions | None = None) -> InspectionModel:
    p = params or InspectionParams()
    options = options or KsOptions()
    model = Model()
    starts, ends, intervals = [], [], []
    for u in range(1, p.units + 1):
        starts.append([model.new_variable(1, p.horizon, name=f"s[{u},{k}]")
                       for k in range(1, p.inspections + 1)])
        ends.append([model.new_variable(1, p.horizon, name=f"e[{u},{k}]")
                     for k in range(1, p.inspections + 1)])
        intervals.append([model.new_variable(0, p.max_gap, name=f"i[{u},{k}]")
                          for k in range(1, p.inspections)])
    rate = model.new_rate_variable([p.rate.numerator], p.rate.denominator, name="lambda")

    flat_s = [v for row in starts for v in row]
    flat_e = [v for row in ends for v in row]
    n = len(flat_s)
    cumulative(model, flat_s, [p.duration] * n, [p.demand] * n, p.capacity, ends=flat_e)
    for u in range(p.units):
        s, i = starts[u], intervals[u]
        model.add(ParametricKs(i, rate, p.alpha, Relation.EQ, options))
        model.add(Linear([(1, ends[u][-1])], p.horizon - p.max_gap, ">="))
        for j in range(1, p.inspections):
            model.add(Linear([(1, i[j - 1]), (-1, s[j]), (1, s[j - 1])], -1, "="))
            model.add(Linear([(1, s[j]), (-1, s[j - 1])], 0, ">="))
    return InspectionModel(model, p, starts, ends, intervals, rate, options)


def check_plan(plan: InspectionPlan, params: InspectionParams,
               sup: str = "exact") -> tuple[bool, list[str]]:
    """Validate every plan property; returns ``(ok, violations)``.

    Checks shape, day range, end = start + duration, gap bounds, the late
    final inspection, daily capacity and each unit's two-tailed KS test
    against exponential(rate).
    """
    p = params
    bad: list[str] = []
    if len(plan.starts) != p.units or len(plan.ends) != p.units:
        bad.append(f"expected {p.units} units, got {len(plan.starts)}")
    usage: dict[int, int] = {}
    target = ExponentialCdf(float(p.rate))
    for u, (ss, es) in enumerate(zip(plan.starts, plan.ends), 1):
        if len(ss) != p.inspections or len(es) != p.inspections:
            bad.append(f"unit {u}: expected {p.inspections} inspections, got {len(ss)}")
            continue
        for k, (s, e) in enumerate(zip(ss, es), 1):
            if not (1 <= s <= p.horizon and 1 <= e <= p.horizon):
                bad.append(f"unit {u} inspection {k}: day outside 1..{p.horizon}")
            if e != s + p.duration:
                bad.append(f"unit {u} inspection {k}: end {e} != start {s} + {p.duration}")
            for t in range(s, s + p.duration):
                usage[t] = usage.get(t, 0) + p.demand
        gaps = [b - a - 1 for a, b in zip(ss, ss[1:])]
        for k, g in enumerate(gaps, 1):
            if not 0 <= g <= p.max_gap:
                bad.append(f"unit {u} interval {k}: gap {g} outside 0..{p.max_gap}")
        if es[-1] < p.horizon - p.max_gap:
            bad.append(f"unit {u}: last end {es[-1]} before day {p.horizon - p.max_gap}")
        stat = ks_one_sample(gaps, target, sup=sup)
        outcome = ks_verdict(stat.d, p.alpha)
        if outcome.reject:
            bad.append(f"unit {u}: KS test rejects exponential({p.rate}) "
                       f"(d={stat.d:.4f}, p={outcome.p_value:.4g})")
    for t in sorted(usage):
        if usage[t] > p.capacity:
            bad.append(f"day {t}: {usage[t]} inspectors needed, {p.capacity} available")
    return not bad, bad


def plan_csv(plan: InspectionPlan) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["unit", "k", "start", "end"])
    w.writerows(plan.rows())
    return buf.getvalue()


# -- plot data ----------------------------------------------------------------------


def emit_cdf_plot_data(values: Iterable[float], reference, alpha: float,
                       grid_points: int = 0) -> list[tuple[float, float, float, float, float]]:
    """Rows ``(x, f_emp, f_ref, lo, hi)`` for drawing a CDF against its band.

    ``reference`` is a CDF callable or a second sample (whose empirical CDF
    becomes the reference). The band is the reference +/- the asymptotic
    half-width for the size of ``values``, clamped to [0, 1]. The evaluation
    grid is every jump point of either function plus ``grid_points`` evenly
    spaced points across the range, for smooth references.
    """
    ecdf = EmpiricalCdf(values)
    if callable(reference):
        ref = reference
        xs = set(ecdf.points)
    else:
        ref = EmpiricalCdf(reference)
        xs = set(ecdf.points) | set(ref.points)
    if grid_points:
        lo_x, hi_x = min(xs), max(xs)
        xs |= set(np.linspace(min(0.0, lo_x), hi_x, grid_points).tolist())
    half = confidence_band(ecdf, alpha)
    rows = []
    for x in sorted(xs):
        f_ref = float(ref(float(x)))
        rows.append((float(x), float(ecdf(float(x))), f_ref,
                     max(0.0, f_ref - half), min(1.0, f_ref + half)))
    return rows


def cdf_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "f_emp", "f_ref", "lo", "hi"])
    for row in rows:
        w.writerow([f"{v:.10g}" for v in row])
    return buf.getvalue()
