"""Desk-scale integration on the unit disk with measured error.

Runs the lazy Metropolis ball walk for two targets, uniform and exp(x_1),
against quadrature references, and shows the 1/sqrt(n) decay of the measured
root-mean-square error over replications. Seeds are fixed: rerunning this
script reproduces every number bit for bit.
"""

from lazymcmc import empirical_mse, parse_density, parse_integrand, reference_integral

DIM = 2
REPS = 20
SEED = 7

for rho_spec, f_spec in (("uniform", "coord2:1"), ("explin:1,0", "coord:1")):
    rho = parse_density(rho_spec, DIM)
    f = parse_integrand(f_spec, DIM)
    reference = reference_integral(rho, f)
    print(f"rho = {rho_spec}, f = {f_spec}")
    print(f"  reference (quadrature): {reference.value:.10f} +/- {reference.error_estimate:.1e}")
    for n in (10_000, 40_000, 160_000, 640_000):
        report = empirical_mse(
            rho, f, n=n, n0=2_000, seed=SEED, replications=REPS, reference=reference.value
        )
        print(
            f"  n={n:>7d}  mean={report.estimate_mean:.6f}  rmse={report.empirical_rmse:.6f}"
            f"  certified bound={report.theoretical_bound:.1f}"
        )
    print()

print("each n quadrupling roughly halves the rmse; the certified bounds are")
print("deliberately loose constants, the measured error sits far below them.")
