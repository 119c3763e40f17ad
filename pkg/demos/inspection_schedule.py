"""Schedule inspections whose gaps look exponentially distributed.

Ten units get 25 one-day inspections each within a year. At most five
inspectors work per day, no gap exceeds 36 days, and each unit's 24 gaps must
pass a two-tailed KS test against an exponential with rate 1/5 at alpha 0.1.
"""

import time

from statcp import ExponentialCdf, InspectionParams, build_inspection_model, check_plan, solve
from statcp.models import cdf_csv, emit_cdf_plot_data

params = InspectionParams()
built = build_inspection_model(params)
t0 = time.perf_counter()
solution = solve(built.model, built.search_config(time_limit=600))
print(f"solved in {time.perf_counter() - t0:.1f}s")

plan = built.plan(solution)
ok, violations = check_plan(plan, params)
print("independent check:", "ok" if ok else violations)
for u, starts in enumerate(plan.starts, 1):
    marks = ["."] * params.horizon
    for s in starts:
        marks[s - 1] = "#"
    print(f"unit {u:2d} {''.join(marks[::3])}")  # every third day, to fit a terminal

print()
print("unit 1 gaps:", plan.intervals[0])
print(cdf_csv(emit_cdf_plot_data(plan.intervals[0], ExponentialCdf(0.2), params.alpha)))
