"""Planning the lazy Metropolis ball walk: step radius, burn-in, error, cost.

For a density on the d-ball with log-Lipschitz constant alpha, everything is
closed form: the tuned radius, a certified conductance lower bound, the
burn-in, and the number of steps for a target error. The total cost grows
polynomially in both d and alpha; the log-log slopes below make that visible.
"""

import math

from lazymcmc import ball_plan, ball_walk_sample_size

EPS = 0.1

print(f"target error {EPS}, unit-sup-norm integrand\n")
print(f"{'d':>3} {'alpha':>6} {'delta':>8} {'phi_lazy':>10} {'n0':>14} {'n':>16} {'cost':>16}")
for d in (1, 2, 4, 8, 16):
    for alpha in (0.0, 1.0, 4.0):
        n = ball_walk_sample_size(d, alpha, EPS)
        plan = ball_plan(d, alpha, n)
        print(
            f"{d:>3} {alpha:>6.1f} {plan.delta:>8.4f} {plan.phi_lazy_lower:>10.3e} "
            f"{plan.n0:>14d} {plan.n:>16d} {plan.cost_total:>16d}"
        )

# polynomial growth: slope of log cost against log d at fixed alpha
print("\nlog-log slope of cost in d (alpha = 1): ", end="")
dims = [2, 4, 8, 16, 32, 64]
costs = [ball_plan(d, 1.0, ball_walk_sample_size(d, 1.0, EPS)).cost_total for d in dims]
slopes = [
    (math.log(costs[i + 1]) - math.log(costs[i])) / (math.log(dims[i + 1]) - math.log(dims[i]))
    for i in range(len(dims) - 1)
]
print(", ".join(f"{s:.2f}" for s in slopes), "(approaches the d^2 regime)")

# the headline-constant bound vs the composed bound at the planned burn-in
print("\nheadline vs composed error bound (they agree at the exact burn-in threshold):")
for d, alpha in ((2, 1.0), (3, 2.0), (8, 0.5)):
    plan = ball_plan(d, alpha, 10**8)
    print(
        f"  d={d} alpha={alpha}: headline={plan.headline_error_bound:.4f} "
        f"composed={plan.composed.error_bound:.4f}"
    )
