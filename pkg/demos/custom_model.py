"""Build a model by hand: pick an exponential rate and a sample together.

Three observations in 4..15 and a rate in {1/10, ..., 10/10} are tied by a
two-tailed KS constraint. With no observation below 4, an exponential with
a high rate puts too much mass below the sample, so propagation removes the
faster rates before any search. A linear constraint caps the sample total.
"""

from statcp import (
    KsOptions,
    Linear,
    Model,
    ParametricKs,
    SearchConfig,
    enumerate_solutions,
    propagate_fixpoint,
)

model = Model()
obs = [model.new_variable(4, 15, name=f"x{k}") for k in range(3)]
rate = model.new_rate_variable(range(1, 11), 10, name="rate")
model.add(ParametricKs(obs, rate, 0.1, "=", KsOptions()))
model.add(Linear([(1, v) for v in obs], 20, "<="))

print("after propagation:")
propagate_fixpoint(model)
for v in obs + [rate]:
    print(f"  {model.names[v]}: {model.domain(v)}")
print("feasible rates:", sorted({str(model.scaled(rate, r)) for r in model.domain(rate)}))

seen = {}
count = enumerate_solutions(model, SearchConfig(),
                            lambda s: seen.setdefault(s[rate], s.by_name()))
print(f"{count} solutions; one per rate:")
for r, sol in sorted(seen.items()):
    print(f"  rate={r}: {[sol[f'x{k}'] for k in range(3)]}")
