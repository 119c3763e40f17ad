"""Distributions, test statistics and verdicts.

All functions are pure. Samples are any iterable of reals; they are sorted
internally. KS statistics are returned already scaled by the square root of
the (effective) sample size, so verdicts compare them directly against the
limiting Kolmogorov distribution.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np
from scipy import optimize, special

__all__ = [
    "DegenerateSampleError",
    "EmpiricalCdf",
    "ExponentialCdf",
    "KsStatistic",
    "Relation",
    "TestOutcome",
    "confidence_band",
    "exponential_cdf",
    "kolmogorov_cdf",
    "kolmogorov_inverse",
    "kolmogorov_sf",
    "ks_one_sample",
    "ks_two_sample",
    "ks_verdict",
    "mean_feasible_interval",
    "stephens_factor",
    "student_t_cdf",
    "student_t_inverse",
    "t_one_sample",
    "t_pvalue",
    "t_two_sample_pooled",
]


class DegenerateSampleError(ValueError):
    """The sample has zero variance, so the t statistic is undefined."""


class Relation(enum.Enum):
    """Type of test: one-tailed (LE, GE), two-tailed (EQ) or its complement (NE)."""

    LE = "<="
    GE = ">="
    EQ = "="
    NE = "!="

    @classmethod
    def parse(cls, text: "str | Relation") -> "Relation":
        if isinstance(text, Relation):
            return text
        aliases = {"<=": cls.LE, "le": cls.LE, ">=": cls.GE, "ge": cls.GE,
                   "=": cls.EQ, "==": cls.EQ, "eq": cls.EQ,
                   "!=": cls.NE, "ne": cls.NE}
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown relation {text!r}") from None


@dataclass(frozen=True)
class TestOutcome:
    statistic: float
    p_value: float
    reject: bool
    alpha: float

    __test__ = False  # keep pytest from collecting this class


@dataclass(frozen=True)
class KsStatistic:
    d_plus: float
    d_minus: float

    @property
    def d(self) -> float:
        return max(self.d_plus, self.d_minus)

    def __iter__(self):
        return iter((self.d_plus, self.d_minus, self.d))


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"significance level must lie in (0, 1), got {alpha}")


# -- Kolmogorov distribution -------------------------------------------------

_THETA_SWITCH = 0.6


def kolmogorov_cdf(t: float) -> float:
    """CDF of the limiting Kolmogorov distribution.

    Uses the Jacobi theta form for small ``t`` and the alternating series
    ``1 - 2 sum (-1)^(k-1) exp(-2 k^2 t^2)`` otherwise.
    """
    if t < 0.02:
        return 0.0  # below exp(-3000): underflows to zero anyway
    if t < _THETA_SWITCH:
        # sqrt(2 pi)/t * sum exp(-(2k-1)^2 pi^2 / (8 t^2))
        w = -(math.pi ** 2) / (8.0 * t * t)
        total, k = 0.0, 1
        while True:
            term = math.exp(w * (2 * k - 1) ** 2)
            total += term
            if term < 1e-17 * total or term == 0.0:
                break
            k += 1
        return min(1.0, math.sqrt(2.0 * math.pi) / t * total)
    return 1.0 - kolmogorov_sf(t)


def kolmogorov_sf(t: float) -> float:
    """Upper tail ``1 - K(t)``, accurate far into the tail."""
    if t <= 0.0:
        return 1.0
    if t < _THETA_SWITCH:
        return 1.0 - kolmogorov_cdf(t)
    x = -2.0 * t * t
    total, sign, k = 0.0, 1.0, 1
    while True:
        term = math.exp(x * k * k)
        total += sign * term
        if term < 1e-16 * max(total, 1e-300) or term == 0.0:
            break
        sign = -sign
        k += 1
    return min(1.0, max(0.0, 2.0 * total))


def kolmogorov_inverse(p: float) -> float:
    """Quantile of the Kolmogorov distribution, found by bracketed root search."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"probability must lie in [0, 1), got {p}")
    if p == 0.0:
        return 0.0
    hi = 1.0
    while kolmogorov_cdf(hi) < p:
        hi *= 2.0
    return optimize.brentq(lambda t: kolmogorov_cdf(t) - p, 0.0, hi,
                           xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def stephens_factor(n_eff: float) -> float:
    """Small-sample multiplier for a sqrt(n)-scaled KS statistic."""
    root = math.sqrt(n_eff)
    return 1.0 + 0.12 / root + 0.11 / n_eff


def ks_verdict(d_stat: float, alpha: float, n_eff: float | None = None) -> TestOutcome:
    """Reject when ``1 - K(d) < alpha``.

    Passing ``n_eff`` applies Stephens' small-sample modification to ``d``
    before evaluating the tail; the default is the plain asymptotic rule.
    """
    _check_alpha(alpha)
    t = d_stat if n_eff is None else d_stat * stephens_factor(n_eff)
    p = kolmogorov_sf(t)
    return TestOutcome(statistic=d_stat, p_value=p, reject=p < alpha, alpha=alpha)


# -- reference distributions ---------------------------------------------------


def exponential_cdf(rate: float, x):
    if rate <= 0:
        raise ValueError("rate must be positive")
    if isinstance(x, (int, float)):
        return 0.0 if x < 0 else -math.expm1(-rate * x)
    x = np.asarray(x, dtype=float)
    out = np.where(x < 0.0, 0.0, -np.expm1(-float(rate) * np.maximum(x, 0.0)))
    return float(out) if out.ndim == 0 else out


class ExponentialCdf:
    """Callable CDF of exponential(rate); continuous, so no separate left limit."""

    def __init__(self, rate: float):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = float(rate)

    def __call__(self, x):
        if isinstance(x, (int, float)):
            return 0.0 if x < 0 else -math.expm1(-self.rate * x)
        return exponential_cdf(self.rate, x)

    def quantile(self, q):
        return -np.log1p(-np.asarray(q, dtype=float)) / self.rate

    def __repr__(self) -> str:
        return f"ExponentialCdf({self.rate:g})"


class EmpiricalCdf:
    """Right-continuous step function ``#{x_i <= x} / n``."""

    def __init__(self, values: Iterable[float]):
        self.sample = sorted(float(v) for v in values)
        if not self.sample:
            raise ValueError("sample must be non-empty")
        self.n = len(self.sample)
        self.points, self.cumulative = _steps(self.sample)

    def __call__(self, x):
        if isinstance(x, (int, float)):
            return bisect.bisect_right(self.sample, x) / self.n
        return np.searchsorted(self.sample, np.asarray(x, dtype=float), side="right") / self.n

    def left_limit(self, x):
        if isinstance(x, (int, float)):
            return bisect.bisect_left(self.sample, x) / self.n
        return np.searchsorted(self.sample, np.asarray(x, dtype=float), side="left") / self.n

    def __repr__(self) -> str:
        return f"EmpiricalCdf(n={self.n})"


def _steps(ordered: list) -> tuple[list, list]:
    """Distinct values of a sorted list and the count of elements <= each."""
    points, cumulative = [], []
    for k, x in enumerate(ordered, 1):
        if points and points[-1] == x:
            cumulative[-1] = k
        else:
            points.append(x)
            cumulative.append(k)
    return points, cumulative


# -- Kolmogorov-Smirnov statistics -----------------------------------------------

SUP_MODES = ("exact", "pointwise")


def ks_one_sample(sample: Iterable[float], target_cdf: Callable, sup: str = "exact") -> KsStatistic:
    """One-sample KS statistics against ``target_cdf``.

    ``sup="exact"`` takes the supremum over the whole real line: for the
    lower deviation it uses the target's left limit just before each jump of
    the empirical CDF (``target_cdf.left_limit`` if the target has jumps).
    ``sup="pointwise"`` only compares the two functions at the sample points,
    which under-measures ``d_minus``.
    """
    if sup not in SUP_MODES:
        raise ValueError(f"unknown sup mode {sup!r}")
    ordered = sorted(float(v) for v in sample)
    n = len(ordered)
    if n == 0:
        raise ValueError("sample must be non-empty")
    points, cumulative = _steps(ordered)
    left = getattr(target_cdf, "left_limit", None) if sup == "exact" else None
    d_plus = d_minus = 0.0
    below = 0
    for x, c in zip(points, cumulative):
        f = target_cdf(x)
        d_plus = max(d_plus, c / n - f)
        if sup == "exact":
            d_minus = max(d_minus, (f if left is None else left(x)) - below / n)
        else:
            d_minus = max(d_minus, f - c / n)
        below = c
    root = math.sqrt(n)
    return KsStatistic(root * d_plus, root * d_minus)


def ks_two_sample(s1: Iterable[float], s2: Iterable[float], sup: str = "exact") -> KsStatistic:
    """Two-sample KS statistics; ``d_plus`` measures ``F1 - F2``.

    ``sup="exact"`` evaluates both empirical CDFs on the merged sample.
    ``sup="reference"`` treats ``s1`` as a fixed reference step function and
    scores each distinct point of ``s2`` against the less favourable of the
    reference's left and right limits there. It always measures at least as
    much as the exact supremum. ``sup="pointwise"`` compares the two
    right-continuous CDFs only at the distinct points of ``s2``, so it never
    measures more than the exact supremum.
    """
    a = sorted(float(v) for v in s1)
    b = sorted(float(v) for v in s2)
    n1, n2 = len(a), len(b)
    if n1 == 0 or n2 == 0:
        raise ValueError("samples must be non-empty")
    d_plus = d_minus = 0.0
    if sup == "exact":
        i = j = 0
        while i < n1 or j < n2:
            x = a[i] if j == n2 or (i < n1 and a[i] <= b[j]) else b[j]
            while i < n1 and a[i] == x:
                i += 1
            while j < n2 and b[j] == x:
                j += 1
            diff = i / n1 - j / n2
            if diff > d_plus:
                d_plus = diff
            elif -diff > d_minus:
                d_minus = -diff
    elif sup == "reference":
        points, cumulative = _steps(b)
        below = 0
        for x, c in zip(points, cumulative):
            d_plus = max(d_plus, bisect.bisect_right(a, x) / n1 - below / n2)
            d_minus = max(d_minus, c / n2 - bisect.bisect_left(a, x) / n1)
            below = c
    elif sup == "pointwise":
        points, cumulative = _steps(b)
        for x, c in zip(points, cumulative):
            diff = bisect.bisect_right(a, x) / n1 - c / n2
            d_plus = max(d_plus, diff)
            d_minus = max(d_minus, -diff)
    else:
        raise ValueError(f"unknown sup mode {sup!r}")
    scale = math.sqrt(n1 * n2 / (n1 + n2))
    return KsStatistic(scale * d_plus, scale * d_minus)


def confidence_band(ecdf: "EmpiricalCdf | int", alpha: float) -> float:
    """Half-width of the ``1 - alpha`` band, asymptotic ``K^-1(1 - alpha) / sqrt(n)``."""
    _check_alpha(alpha)
    n = ecdf if isinstance(ecdf, (int, np.integer)) else ecdf.n
    if n < 1:
        raise ValueError("sample size must be positive")
    return kolmogorov_inverse(1.0 - alpha) / math.sqrt(n)


# -- Student's t ------------------------------------------------------------------


def student_t_cdf(dof: int, t: float) -> float:
    """CDF of Student's t via the regularized incomplete beta function."""
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * special.betainc(0.5 * dof, 0.5, dof / (dof + t * t))
    return float(1.0 - tail if t > 0 else tail)


def student_t_inverse(dof: int, p: float) -> float:
    if dof < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {p}")
    if p == 0.5:
        return 0.0
    t = float(special.stdtrit(dof, p))
    # one Newton step against our own CDF keeps the round trip tight
    dens = math.exp(special.gammaln((dof + 1) / 2) - special.gammaln(dof / 2)) / math.sqrt(
        dof * math.pi) * (1 + t * t / dof) ** (-(dof + 1) / 2)
    if dens > 0:
        t -= (student_t_cdf(dof, t) - p) / dens
    return t


def _mean_sd(values: Iterable[float]) -> tuple[float, float, int]:
    arr = np.asarray(list(values), dtype=float)
    n = arr.size
    if n < 2:
        raise ValueError("need at least two observations")
    mean = float(arr.mean())
    sd = float(np.sqrt(np.sum((arr - mean) ** 2) / (n - 1)))
    if sd == 0.0:
        raise DegenerateSampleError("sample has zero variance")
    return mean, sd, n


def t_one_sample(sample: Iterable[float], mu: float) -> float:
    mean, sd, n = _mean_sd(sample)
    return (mean - mu) / (sd / math.sqrt(n))


def t_two_sample_pooled(s1: Iterable[float], s2: Iterable[float]) -> tuple[float, int]:
    """Equal-variance two-sample t statistic and its degrees of freedom."""
    a = np.asarray(list(s1), dtype=float)
    b = np.asarray(list(s2), dtype=float)
    n1, n2 = a.size, b.size
    if n1 < 1 or n2 < 1 or n1 + n2 < 3:
        raise ValueError("need n1 + n2 >= 3 with both samples non-empty")
    dof = n1 + n2 - 2
    pooled = (np.sum((a - a.mean()) ** 2) + np.sum((b - b.mean()) ** 2)) / dof
    if pooled == 0.0:
        raise DegenerateSampleError("pooled variance is zero")
    t = (a.mean() - b.mean()) / math.sqrt(pooled * (1.0 / n1 + 1.0 / n2))
    return float(t), dof


def t_pvalue(t: float, dof: int, relation: Relation) -> float:
    """p-value of a t statistic for the null hypothesis named by ``relation``.

    LE: the mean is at most the reference (large ``t`` is evidence against).
    GE: the mean is at least the reference. EQ and NE: two-tailed.
    """
    relation = Relation.parse(relation)
    if relation is Relation.LE:
        return student_t_cdf(dof, -t)
    if relation is Relation.GE:
        return student_t_cdf(dof, t)
    return min(1.0, 2.0 * student_t_cdf(dof, -abs(t)))


def mean_feasible_interval(
    sample: Iterable[float], alpha: float, w: "Relation | str"
) -> tuple[float, float]:
    """Closed interval of means the one-sample t-test fails to reject.

    For NE the returned interval is the one for EQ; the feasible set is its
    complement.
    """
    _check_alpha(alpha)
    w = Relation.parse(w)
    mean, sd, n = _mean_sd(sample)
    se = sd / math.sqrt(n)
    if w in (Relation.EQ, Relation.NE):
        q = student_t_inverse(n - 1, alpha / 2.0)  # negative
        return mean + se * q, mean - se * q
    q = student_t_inverse(n - 1, alpha)
    if w is Relation.LE:
        return mean + se * q, math.inf
    return -math.inf, mean - se * q
