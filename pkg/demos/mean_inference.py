"""Which population means are compatible with ten observations?

A t-test constraint links ten fixed observations to a mean variable m in
0..20. Propagation alone removes every m the two-tailed test would reject.
"""

from statcp import Status, mean_feasible_interval, propagate_fixpoint
from statcp.models import MEAN_SAMPLE, build_ttest_mean_model

for alpha in (0.01, 0.05, 0.2, 0.5):
    built = build_ttest_mean_model(alpha)
    status = propagate_fixpoint(built.model)
    lo, hi = mean_feasible_interval(MEAN_SAMPLE, alpha, "=")
    print(f"alpha={alpha:<5} {status.name:8} D(m)={list(built.model.domain(built.mean))}"
          f"  interval=[{lo:.3f}, {hi:.3f}]")

# one-sided variants keep a half-line of means
for rel in ("<=", ">="):
    built = build_ttest_mean_model(0.05, relation=rel)
    propagate_fixpoint(built.model)
    print(f"relation {rel}: D(m)={list(built.model.domain(built.mean))}")
