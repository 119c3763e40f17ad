"""Statistical constraints as propagators.

A statistical constraint is satisfied by an assignment when the embedded
hypothesis test *fails to reject* at significance ``alpha``. The KS
constraints are monotone in each variable, so bounds can be filtered by
testing the most favourable completion built from the other variables'
bounds.

Direction conventions (``d_plus`` is the scaled sup of ``F_s - F``):

* GE tests ``d_plus``: large observations and large rates are favourable.
* LE tests ``d_minus``: small observations and small rates are favourable.
* EQ is the two-tailed test, i.e. GE and LE both at ``alpha``.
* NE is the complement of EQ and is only checked on ground assignments.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

from .solver import Inconsistency, Model, Propagator
from .stats import (
    DegenerateSampleError,
    ExponentialCdf,
    Relation,
    kolmogorov_sf,
    ks_one_sample,
    ks_two_sample,
    mean_feasible_interval,
    stephens_factor,
    t_one_sample,
    t_pvalue,
    t_two_sample_pooled,
)

__all__ = [
    "KsOptions",
    "NonParametricKs",
    "ParametricKs",
    "TTest",
    "check_ground_ks_nonparametric",
    "check_ground_ks_parametric",
    "check_ground_ttest",
    "check_ground_ttest_two_sample",
]

EQ_MODES = ("two_tailed", "decomposed")
# statistics that move monotonically with each sample value; bound filtering
# is only sound for these, other modes are checked once the scope is ground
MONOTONE_SUPS = ("exact", "reference")


class KsOptions:
    """Numerical conventions shared by the KS checks and propagators.

    sup:      ``"exact"`` or ``"pointwise"`` (one-sample); ``"exact"``,
              ``"pointwise"`` or ``"reference"`` (two-sample). See :mod:`statcp.stats`.
    eq_mode:  ``"two_tailed"`` runs both one-sided tests at ``alpha``;
              ``"decomposed"`` runs them at ``1 - (1 - alpha) / 2``.
    small_sample: apply Stephens' modification to the statistic before
              taking the Kolmogorov tail.
    """

    __slots__ = ("sup", "eq_mode", "small_sample")

    def __init__(self, sup: str = "exact", eq_mode: str = "two_tailed", small_sample: bool = False):
        if eq_mode not in EQ_MODES:
            raise ValueError(f"unknown EQ mode {eq_mode!r}")
        self.sup = sup
        self.eq_mode = eq_mode
        self.small_sample = small_sample

    def level(self, alpha: float, relation: Relation) -> float:
        if relation in (Relation.EQ, Relation.NE) and self.eq_mode == "decomposed":
            return 1.0 - (1.0 - alpha) / 2.0
        return alpha

    def __repr__(self) -> str:
        return (f"KsOptions(sup={self.sup!r}, eq_mode={self.eq_mode!r}, "
                f"small_sample={self.small_sample})")


_DEFAULT = KsOptions()


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"significance level must lie in (0, 1), got {alpha}")


def _passes(stat: float, level: float, n_eff: float | None) -> bool:
    t = stat if n_eff is None else stat * stephens_factor(n_eff)
    return kolmogorov_sf(t) >= level


def _directions(relation: Relation) -> tuple:
    if relation is Relation.GE:
        return (Relation.GE,)
    if relation is Relation.LE:
        return (Relation.LE,)
    return (Relation.GE, Relation.LE)


# -- ground checks ----------------------------------------------------------------


def _ks_ground(stat, n_eff, alpha, relation, options) -> bool:
    level = options.level(alpha, relation)
    if relation is Relation.GE:
        return _passes(stat.d_plus, level, n_eff)
    if relation is Relation.LE:
        return _passes(stat.d_minus, level, n_eff)
    eq = _passes(stat.d_plus, level, n_eff) and _passes(stat.d_minus, level, n_eff)
    return eq if relation is Relation.EQ else not eq


def check_ground_ks_parametric(
    values: Sequence[float],
    rate: float,
    alpha: float,
    relation: "Relation | str",
    options: KsOptions = _DEFAULT,
    family: Callable = ExponentialCdf,
) -> bool:
    """True iff the one-sample KS test against ``family(rate)`` fails to reject."""
    _check_alpha(alpha)
    relation = Relation.parse(relation)
    stat = ks_one_sample(values, family(rate), sup=options.sup)
    n_eff = len(values) if options.small_sample else None
    return _ks_ground(stat, n_eff, alpha, relation, options)


def check_ground_ks_nonparametric(
    v1: Sequence[float],
    v2: Sequence[float],
    alpha: float,
    relation: "Relation | str",
    options: KsOptions = _DEFAULT,
) -> bool:
    """True iff the two-sample KS test fails to reject."""
    _check_alpha(alpha)
    relation = Relation.parse(relation)
    stat = ks_two_sample(v1, v2, sup=options.sup)
    n_eff = len(v1) * len(v2) / (len(v1) + len(v2)) if options.small_sample else None
    return _ks_ground(stat, n_eff, alpha, relation, options)


def check_ground_ttest(values: Sequence[float], mean: float, alpha: float,
                       relation: "Relation | str") -> bool:
    """One-sample t-test; a zero-variance sample counts as a rejection."""
    _check_alpha(alpha)
    relation = Relation.parse(relation)
    try:
        t = t_one_sample(values, mean)
    except DegenerateSampleError:
        return False
    dof = len(values) - 1
    if relation is Relation.NE:
        return t_pvalue(t, dof, Relation.EQ) < alpha
    return t_pvalue(t, dof, relation) >= alpha


def check_ground_ttest_two_sample(v1: Sequence[float], v2: Sequence[float], alpha: float,
                                  relation: "Relation | str") -> bool:
    _check_alpha(alpha)
    relation = Relation.parse(relation)
    try:
        t, dof = t_two_sample_pooled(v1, v2)
    except DegenerateSampleError:
        return False
    if relation is Relation.NE:
        return t_pvalue(t, dof, Relation.EQ) < alpha
    return t_pvalue(t, dof, relation) >= alpha


# -- propagators ------------------------------------------------------------------


class ParametricKs(Propagator):
    """KS test of observations against ``family(rate)``; rate is a model variable.

    Bound filtering follows the classic two-loop scheme: each observation's
    unfavourable bound is shaved while the completion (others at their
    favourable bound, rate at its favourable bound) is rejected; then the
    rate's unfavourable bound is shaved with all observations favourable.

    ``literal_rate_loop=True`` instead tests rate bounds against the
    completion left behind by the observation loop: every observation at its
    (shaved) unfavourable bound except the last, which is reset to its
    favourable bound. That completion is dominated, so this variant can
    remove supported rates; it exists for comparison only.
    """

    name = "ks_parametric"

    def __init__(self, observations: Sequence[int], rate: int, alpha: float,
                 relation: "Relation | str" = Relation.EQ,
                 options: KsOptions = _DEFAULT, family: Callable = ExponentialCdf,
                 literal_rate_loop: bool = False):
        _check_alpha(alpha)
        if not observations:
            raise ValueError("need at least one observation")
        self.observations = tuple(observations)
        self.rate = rate
        self.alpha = alpha
        self.relation = Relation.parse(relation)
        self.options = options
        self.family = family
        self.literal_rate_loop = literal_rate_loop
        self.n_eff = len(self.observations) if options.small_sample else None
        super().__init__(self.observations + (rate,))

    def _ok(self, model: Model, values, rate_raw: int, direction: Relation) -> bool:
        stat = ks_one_sample(values, self.family(float(model.scaled(self.rate, rate_raw))),
                             sup=self.options.sup)
        d = stat.d_plus if direction is Relation.GE else stat.d_minus
        return _passes(d, self.options.level(self.alpha, self.relation), self.n_eff)

    def propagate(self, model: Model) -> None:
        obs = self.observations
        if self.relation is Relation.NE or self.options.sup not in MONOTONE_SUPS:
            if all(model.is_fixed(v) for v in self.variables):
                values = [model.min(v) for v in obs]
                rate = float(model.value(self.rate))
                if not check_ground_ks_parametric(values, rate, self.alpha, self.relation,
                                                  self.options, self.family):
                    raise Inconsistency("ks_parametric")
            return
        for direction in _directions(self.relation):
            self._filter(model, direction)

    def _filter(self, model: Model, direction: Relation) -> None:
        ge = direction is Relation.GE
        obs, lam = self.observations, self.rate
        # favourable values: sups for GE, infs for LE
        best = [model.max(v) if ge else model.min(v) for v in obs]
        lam_best = model.max(lam) if ge else model.min(lam)
        # every completion is dominated by the all-favourable one; for a fixed
        # variable the two coincide, so one test covers all fixed variables
        if not self._ok(model, best, lam_best, direction):
            raise Inconsistency(self.name)
        for i, v in enumerate(obs):
            if model.is_fixed(v):
                continue
            values = list(best)
            while True:
                worst = model.min(v) if ge else model.max(v)
                values[i] = worst
                if self._ok(model, values, lam_best, direction):
                    break
                model.remove(v, worst)
        rate_completion = best
        if self.literal_rate_loop:
            rate_completion = [model.min(v) if ge else model.max(v) for v in obs]
            rate_completion[-1] = best[-1]
        while not model.is_fixed(lam):
            worst = model.min(lam) if ge else model.max(lam)
            if self._ok(model, rate_completion, worst, direction):
                break
            model.remove(lam, worst)


class NonParametricKs(Propagator):
    """Two-sample KS test between observation lists ``sample1`` and ``sample2``.

    For GE (``F1 - F2`` small) the first sample prefers high values and the
    second sample low values; LE is the mirror image.
    """

    name = "ks_nonparametric"

    def __init__(self, sample1: Sequence[int], sample2: Sequence[int], alpha: float,
                 relation: "Relation | str" = Relation.EQ, options: KsOptions = _DEFAULT):
        _check_alpha(alpha)
        if not sample1 or not sample2:
            raise ValueError("both samples need at least one variable")
        self.sample1 = tuple(sample1)
        self.sample2 = tuple(sample2)
        self.alpha = alpha
        self.relation = Relation.parse(relation)
        self.options = options
        n1, n2 = len(self.sample1), len(self.sample2)
        self.n_eff = n1 * n2 / (n1 + n2) if options.small_sample else None
        super().__init__(self.sample1 + self.sample2)

    def _ok(self, v1, v2, direction: Relation) -> bool:
        stat = ks_two_sample(v1, v2, sup=self.options.sup)
        d = stat.d_plus if direction is Relation.GE else stat.d_minus
        return _passes(d, self.options.level(self.alpha, self.relation), self.n_eff)

    def propagate(self, model: Model) -> None:
        if self.relation is Relation.NE or self.options.sup not in MONOTONE_SUPS:
            if all(model.is_fixed(v) for v in self.variables):
                v1 = [model.min(v) for v in self.sample1]
                v2 = [model.min(v) for v in self.sample2]
                if not check_ground_ks_nonparametric(v1, v2, self.alpha, self.relation,
                                                     self.options):
                    raise Inconsistency("ks_nonparametric")
            return
        for direction in _directions(self.relation):
            self._filter(model, direction)

    def _filter(self, model: Model, direction: Relation) -> None:
        ge = direction is Relation.GE
        hi1 = [model.max(v) for v in self.sample1]
        lo1 = [model.min(v) for v in self.sample1]
        hi2 = [model.max(v) for v in self.sample2]
        lo2 = [model.min(v) for v in self.sample2]
        best1, best2 = (hi1, lo2) if ge else (lo1, hi2)
        if not self._ok(best1, best2, direction):
            raise Inconsistency(self.name)
        for i, v in enumerate(self.sample1):
            if model.is_fixed(v):
                continue
            values = list(best1)
            while True:
                worst = model.min(v) if ge else model.max(v)
                values[i] = worst
                if self._ok(values, best2, direction):
                    break
                model.remove(v, worst)
        for i, v in enumerate(self.sample2):
            if model.is_fixed(v):
                continue
            values = list(best2)
            while True:
                worst = model.max(v) if ge else model.min(v)
                values[i] = worst
                if self._ok(best1, values, direction):
                    break
                model.remove(v, worst)


class TTest(Propagator):
    """Student's t-test constraint on a sample and a mean (or a second sample).

    Filtering happens only once every observation is fixed: the mean's
    domain is then cut to the interval of values the test does not reject.
    Otherwise the constraint is checked when the scope becomes ground.
    """

    name = "ttest"

    def __init__(self, observations: Sequence[int], mean: int | None, alpha: float,
                 relation: "Relation | str" = Relation.EQ,
                 observations2: Sequence[int] | None = None):
        _check_alpha(alpha)
        if (mean is None) == (observations2 is None):
            raise ValueError("give either a mean variable or a second sample")
        self.observations = tuple(observations)
        self.observations2 = tuple(observations2) if observations2 is not None else None
        if self.observations2 is None and len(self.observations) < 2:
            raise ValueError("need at least two observations")
        self.mean = mean
        self.alpha = alpha
        self.relation = Relation.parse(relation)
        scope = self.observations + (self.observations2 or ()) + (() if mean is None else (mean,))
        super().__init__(scope)

    def propagate(self, model: Model) -> None:
        if self.observations2 is not None:
            if all(model.is_fixed(v) for v in self.variables):
                v1 = [model.value(v) for v in self.observations]
                v2 = [model.value(v) for v in self.observations2]
                if not check_ground_ttest_two_sample(v1, v2, self.alpha, self.relation):
                    raise Inconsistency("ttest")
            return
        if not all(model.is_fixed(v) for v in self.observations):
            return
        values = [float(model.value(v)) for v in self.observations]
        m = self.mean
        den = model.scales.get(m, 1)
        if self.relation is Relation.NE:
            if model.is_fixed(m) and not check_ground_ttest(
                    values, float(model.value(m)), self.alpha, Relation.NE):
                raise Inconsistency("ttest")
            return
        try:
            lo, hi = mean_feasible_interval(values, self.alpha, self.relation)
        except DegenerateSampleError as exc:
            model.diagnostics.append(f"ttest: {exc}")
            raise Inconsistency("ttest") from None
        if lo != -math.inf:
            model.set_min(m, math.ceil(lo * den - 1e-9))
        if hi != math.inf:
            model.set_max(m, math.floor(hi * den + 1e-9))
        # settle values within rounding distance of the interval ends exactly
        while not check_ground_ttest(values, model.min(m) / den, self.alpha, self.relation):
            model.remove(m, model.min(m))
        while not check_ground_ttest(values, model.max(m) / den, self.alpha, self.relation):
            model.remove(m, model.max(m))
