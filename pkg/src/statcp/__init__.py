"""Finite-domain constraint solver with statistical hypothesis-test constraints."""

from .constraints import (
    KsOptions,
    NonParametricKs,
    ParametricKs,
    TTest,
    check_ground_ks_nonparametric,
    check_ground_ks_parametric,
    check_ground_ttest,
    check_ground_ttest_two_sample,
)
from .models import (
    InspectionParams,
    InspectionPlan,
    build_inspection_model,
    build_ks_sets_model,
    build_ttest_mean_model,
    check_plan,
    emit_cdf_plot_data,
)
from .scheduling import Cumulative, Linear, cumulative, linear
from .solver import (
    Domain,
    Inconsistency,
    LimitExceeded,
    Model,
    Propagator,
    SearchConfig,
    SearchStats,
    Solution,
    Status,
    enumerate_solutions,
    iter_solutions,
    propagate_fixpoint,
    solve,
)
from .stats import (
    DegenerateSampleError,
    EmpiricalCdf,
    ExponentialCdf,
    KsStatistic,
    Relation,
    TestOutcome,
    confidence_band,
    exponential_cdf,
    kolmogorov_cdf,
    kolmogorov_inverse,
    kolmogorov_sf,
    ks_one_sample,
    ks_two_sample,
    ks_verdict,
    mean_feasible_interval,
    stephens_factor,
    student_t_cdf,
    student_t_inverse,
    t_one_sample,
    t_pvalue,
    t_two_sample_pooled,
)

__version__ = "0.1.0"
