"""Tour of the exact finite-chain layer.

Everything the continuous sampler promises statistically is checkable with
plain linear algebra on a small transition matrix: stationarity, detailed
balance, laziness, conductance (by full subset enumeration, witness set
included), operator positivity, and the exact mean-square error of the
burn-in average. This script walks a 4-state chain through all of it.
"""

import numpy as np

from lazymcmc import (
    DiscreteKernel,
    ProbabilityVector,
    StateFunction,
    check_operator_psd,
    check_reversibility,
    check_stationarity,
    conductance_exact,
    error_bound,
    exact_mse_discrete,
    lazify,
    stationary_error_bound,
    stationary_mse_curve,
)
from lazymcmc.chain import density_bound, norm_under

# a reversible 4-state chain built from a symmetric flow matrix
flows = np.array(
    [
        [0.10, 0.05, 0.02, 0.03],
        [0.05, 0.20, 0.04, 0.01],
        [0.02, 0.04, 0.15, 0.09],
        [0.03, 0.01, 0.09, 0.07],
    ]
)
pi = ProbabilityVector(flows.sum(axis=1) / flows.sum())
kernel = DiscreteKernel(flows / flows.sum(axis=1, keepdims=True))

print("stationary:", check_stationarity(kernel, pi, 1e-10))
print("reversible:", check_reversibility(kernel, pi, 1e-10))

# lazification keeps both properties, halves conductance, and fixes the spectrum
lazy = lazify(kernel)
phi = conductance_exact(kernel, pi)
phi_lazy = conductance_exact(lazy, pi)
print(f"conductance: {phi.phi:.6f} with witness {phi.witness_set}")
print(f"after lazify: {phi_lazy.phi:.6f} (exactly half)")
print("lazy operator PSD:", check_operator_psd(lazy, pi, 1e-10))

# exact error of the burn-in average vs the closed-form bounds
f = StateFunction([1.0, -0.5, 0.25, -1.0])
f_l2 = norm_under(f, pi, 2)
f_sup = norm_under(f, pi, np.inf)

print("\nstationary start, exact rmse vs 2||f||_2/(phi sqrt(n)):")
curve = stationary_mse_curve(lazy, pi, f, 200)
for n in (1, 10, 50, 200):
    exact = float(np.sqrt(curve[n - 1]))
    bound = stationary_error_bound(phi_lazy.phi, n, f_l2)
    print(f"  n={n:4d}  exact={exact:.6f}  bound={bound:.6f}  ratio={exact / bound:.3f}")

print("\ngeneral start (all mass on state 0), with and without burn-in:")
nu = ProbabilityVector([1.0, 0.0, 0.0, 0.0])
m = density_bound(nu, pi)
for n0 in (0, 5, 25, 100):
    exact = float(np.sqrt(exact_mse_discrete(lazy, pi, nu, f, 50, n0)))
    bound = error_bound(phi_lazy.phi, 50, n0, m, f_sup).error_bound
    print(f"  n0={n0:3d}  exact={exact:.6f}  bound={bound:.6f}")
