"""Exact verification suites for every inequality and identity in the package.

Each suite draws random finite chains (reversible by construction), computes
the quantity on both sides of one inequality or identity with exact linear
algebra, and records violations with a JSON reproducer. The suites back the
``verify`` CLI command and the acceptance tests; default instance counts and
tolerances are the contractual ones.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import burn_in, cheeger_bound, conductance_exact, error_bound, mixing_bound, stationary_error_bound
from .chain import (
    ProbabilityVector,
    apply_operator,
    chain_to_json,
    check_operator_psd,
    density_bound,
    lazify,
    mean_under,
    n_step,
    norm_under,
    random_reversible_pair,
    random_start_distribution,
    random_state_function,
    reversibility_residual,
    smallest_operator_eigenvalue,
)
from .estimator import exact_mse_discrete, exact_mse_grid, mse_decomposition_rhs, stationary_mse_curve
from .walk import build_metropolis_kernel, reweighted_target

IDENTITY_TOL = 1e-10
EXACT_TOL = 1e-12
MAX_VIOLATIONS_KEPT = 5


@dataclass
class CheckResult:
    """Outcome of one verification suite.

    ``worst`` is the largest violation margin seen (negative or zero margins
    mean every comparison passed with room); ``violations`` holds up to
    ``MAX_VIOLATIONS_KEPT`` reproducers (chain JSON plus parameters).
    """

    name: str
    tolerance: float
    instances: int = 0
    comparisons: int = 0
    worst: float = -math.inf
    violations: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations

    def record(self, margin, reproducer_fn):
        self.comparisons += 1
        if margin > self.worst:
            self.worst = margin
        if margin > self.tolerance and len(self.violations) < MAX_VIOLATIONS_KEPT:
            self.violations.append(reproducer_fn())

    def summary(self):
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: instances={self.instances} comparisons={self.comparisons} "
            f"worst={self.worst:.3e} tol={self.tolerance:.0e}"
        )

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "instances": self.instances,
            "comparisons": self.comparisons,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "violations": self.violations,
        }


def _random_sizes(rng, chains, s_max=8, s_min=2):
    return rng.integers(s_min, s_max + 1, size=chains)


def pair_swap_suite(seed=0, chains=200, s_max=8):
    """Swap symmetry of pair expectations under reversible kernels.

    For reversible (K, pi) and bounded F on state pairs, the flow-weighted
    sums of F(i, j) and F(j, i) agree; the same holds with K replaced by any
    n-step power.
    """
    rng = np.random.default_rng(seed)
    check = CheckResult("pair_swap_identity", IDENTITY_TOL)
    for size in _random_sizes(rng, chains, s_max):
        kernel, pi = random_reversible_pair(rng, int(size))
        pair_fn = rng.uniform(-1.0, 1.0, size=(size, size))
        steps = int(rng.integers(2, 6))
        check.instances += 1
        for mat in (kernel.matrix, n_step(kernel, steps).matrix):
            flows = pi.weights[:, None] * mat
            lhs = float(np.sum(flows * pair_fn))
            rhs = float(np.sum(flows * pair_fn.T))
            check.record(
                abs(lhs - rhs),
                lambda k=kernel, p=pi, v=abs(lhs - rhs): {
                    "chain": chain_to_json(k, p),
                    "residual": v,
                },
            )
    return check


def stationary_average_suite(seed=1, chains=200, s_max=8):
    """One chain step from stationarity preserves every average."""
    rng = np.random.default_rng(seed)
    check = CheckResult("stationary_average_identity", IDENTITY_TOL)
    for size in _random_sizes(rng, chains, s_max):
        kernel, pi = random_reversible_pair(rng, int(size))
        f = random_state_function(rng, int(size))
        check.instances += 1
        direct = mean_under(f, pi)
        stepped = float(np.sum(pi.weights[:, None] * kernel.matrix * f.values[None, :]))
        check.record(
            abs(direct - stepped),
            lambda k=kernel, p=pi, v=abs(direct - stepped): {"chain": chain_to_json(k, p), "residual": v},
        )
    return check


def contraction_suite(seed=2, chains=200, s_max=8):
    """The Markov operator contracts the pi-weighted L_1, L_2, and sup norms."""
    rng = np.random.default_rng(seed)
    check = CheckResult("operator_norm_contraction", IDENTITY_TOL)
    for size in _random_sizes(rng, chains, s_max):
        kernel, pi = random_reversible_pair(rng, int(size))
        f = random_state_function(rng, int(size))
        steps = int(rng.integers(1, 8))
        iterated = apply_operator(n_step(kernel, steps), f)
        check.instances += 1
        for p in (1, 2, math.inf):
            excess = norm_under(iterated, pi, p) - norm_under(f, pi, p)
            check.record(
                excess,
                lambda k=kernel, pv=pi, pp=p, v=excess: {
                    "chain": chain_to_json(k, pv),
                    "p": repr(pp),
                    "excess": v,
                },
            )
    return check


def lazy_psd_suite(seed=3, chains=200, s_max=8, extra_chains=()):
    """Lazy reversible kernels have positive-semidefinite Markov operators.

    ``extra_chains`` takes (kernel, pi) pairs that are checked as-is (no
    lazification); injecting a non-lazy chain demonstrates the failure
    reporting with its smallest eigenvalue as witness.
    """
    rng = np.random.default_rng(seed)
    check = CheckResult("lazy_operator_psd", IDENTITY_TOL)
    candidates = []
    for size in _random_sizes(rng, chains, s_max):
        kernel, pi = random_reversible_pair(rng, int(size))
        candidates.append((lazify(kernel), pi))
    candidates.extend(extra_chains)
    for kernel, pi in candidates:
        check.instances += 1
        passed = check_operator_psd(kernel, pi, IDENTITY_TOL)
        smallest = smallest_operator_eigenvalue(kernel, pi)
        check.record(
            -smallest,
            lambda k=kernel, p=pi, e=smallest, ok=passed: {
                "chain": chain_to_json(k, p),
                "smallest_eigenvalue": e,
                "check_operator_psd": ok,
            },
        )
    return check


def cheeger_decay_suite(seed=4, chains=200, s_max=8, j_max=50, funcs=20):
    """<P^j g, g> decays at least like (1 - phi^2/2)^j for mean-zero g (lazy chains)."""
    rng = np.random.default_rng(seed)
    check = CheckResult("cheeger_decay", IDENTITY_TOL)
    for size in _random_sizes(rng, chains, s_max):
        base, pi = random_reversible_pair(rng, int(size))
        kernel = lazify(base)
        phi = conductance_exact(kernel, pi).phi
        check.instances += 1
        for _ in range(funcs):
            raw = random_state_function(rng, int(size))
            g = raw.values - mean_under(raw, pi)
            norm_sq = float(np.sum(pi.weights * g * g))
            h = g.copy()
            for j in range(1, j_max + 1):
                h = kernel.matrix @ h
                lhs = float(np.sum(pi.weights * g * h))
                excess = lhs - cheeger_bound(phi, j, norm_sq)
                check.record(
                    excess,
                    lambda k=kernel, p=pi, jj=j, v=excess: {
                        "chain": chain_to_json(k, p),
                        "j": jj,
                        "excess": v,
                    },
                )
    return check


def mixing_decay_suite(seed=5, chains=200, s_max=8, j_max=50):
    """|nu K^j(A) - pi(A)| over ALL subsets A is dominated by the mixing bound.

    The subset maximum is computed exhaustively (2^s indicator matrix), not
    via the positive/negative-part shortcut, so the inequality is checked
    exactly as stated.
    """
    rng = np.random.default_rng(seed)
    check = CheckResult("mixing_decay", IDENTITY_TOL)
    indicator_cache = {}
    for size in _random_sizes(rng, chains, s_max):
        size = int(size)
        base, pi = random_reversible_pair(rng, size)
        kernel = lazify(base)
        nu = random_start_distribution(rng, pi)
        phi = conductance_exact(kernel, pi).phi
        bound_m = density_bound(nu, pi)
        if size not in indicator_cache:
            masks = np.arange(1, 1 << size, dtype=np.uint32)
            indicator_cache[size] = ((masks[:, None] >> np.arange(size, dtype=np.uint32)[None, :]) & 1).astype(float)
        indicators = indicator_cache[size]
        check.instances += 1
        dist = nu.weights.copy()
        for j in range(1, j_max + 1):
            dist = dist @ kernel.matrix
            worst_set_error = float(np.abs(indicators @ (dist - pi.weights)).max())
            excess = worst_set_error - mixing_bound(phi, bound_m, j)
            check.record(
                excess,
                lambda k=kernel, p=pi, nn=nu, jj=j, v=excess: {
                    "chain": chain_to_json(k, p),
                    "nu": nn.weights.tolist(),
                    "j": jj,
                    "excess": v,
                },
            )
    return check


def lazify_conductance_suite(seed=6, chains=200, s_max=8):
    """Lazification halves the exact conductance (identity flow never leaves A)."""
    rng = np.random.default_rng(seed)
    check = CheckResult("lazify_halves_conductance", EXACT_TOL)
    for size in _random_sizes(rng, chains, s_max):
        kernel, pi = random_reversible_pair(rng, int(size))
        phi = conductance_exact(kernel, pi).phi
        phi_lazy = conductance_exact(lazify(kernel), pi).phi
        check.instances += 1
        residual = abs(phi_lazy - 0.5 * phi)
        check.record(
            residual,
            lambda k=kernel, p=pi, v=residual: {"chain": chain_to_json(k, p), "residual": v},
        )
    return check


def metropolis_reversible_suite(seed=7, instances=200, s_max=8):
    """The discrete Metropolis kernel is reversible w.r.t. the reweighted target."""
    rng = np.random.default_rng(seed)
    check = CheckResult("metropolis_reversible", EXACT_TOL)
    for size in _random_sizes(rng, instances, s_max):
        proposal, mu = random_reversible_pair(rng, int(size))
        rho = rng.uniform(0.2, 5.0, size=int(size))
        metro = build_metropolis_kernel(proposal, rho)
        target = ProbabilityVector(reweighted_target(mu.weights, rho))
        check.instances += 1
        residual = reversibility_residual(metro, target)
        check.record(
            residual,
            lambda k=proposal, p=mu, r=rho, v=residual: {
                "proposal": chain_to_json(k, p),
                "rho": r.tolist(),
                "residual": v,
            },
        )
    return check


def lazify_order_suite(seed=8, instances=200, s_max=8):
    """Metropolis over a lazified proposal equals the lazified Metropolis kernel."""
    rng = np.random.default_rng(seed)
    check = CheckResult("lazify_metropolis_commute", EXACT_TOL)
    for size in _random_sizes(rng, instances, s_max):
        proposal, mu = random_reversible_pair(rng, int(size))
        rho = rng.uniform(0.2, 5.0, size=int(size))
        lazy_first = build_metropolis_kernel(lazify(proposal), rho)
        metro_first = lazify(build_metropolis_kernel(proposal, rho))
        check.instances += 1
        residual = float(np.abs(lazy_first.matrix - metro_first.matrix).max())
        check.record(
            residual,
            lambda k=proposal, p=mu, r=rho, v=residual: {
                "proposal": chain_to_json(k, p),
                "rho": r.tolist(),
                "residual": v,
            },
        )
    return check


def stationary_start_mse_suite(seed=9, chains=30, s_max=8, n_max=200, funcs=20):
    """Exact stationary-start rmse never exceeds 2 ||f||_2 / (phi sqrt(n))."""
    rng = np.random.default_rng(seed)
    check = CheckResult("stationary_start_error_bound", IDENTITY_TOL)
    for size in _random_sizes(rng, chains, s_max):
        base, pi = random_reversible_pair(rng, int(size))
        kernel = lazify(base)
        phi = conductance_exact(kernel, pi).phi
        check.instances += 1
        for _ in range(funcs):
            f = random_state_function(rng, int(size))
            f_l2 = norm_under(f, pi, 2)
            curve = stationary_mse_curve(kernel, pi, f, n_max)
            rmse = np.sqrt(np.maximum(curve, 0.0))
            bounds_curve = np.array([stationary_error_bound(phi, n, f_l2) for n in range(1, n_max + 1)])
            worst = float((rmse - bounds_curve).max())
            check.record(
                worst,
                lambda k=kernel, p=pi, ff=f, v=worst: {
                    "chain": chain_to_json(k, p),
                    "f": ff.values.tolist(),
                    "excess": v,
                },
            )
    return check


def general_start_mse_suite(seed=10, instances=100, s_max=8, n_max=100, n0_max=50):
    """Exact general-start rmse vs the explicit bound, plus the burn-in rule.

    For each instance the full (n, n0) grid is compared against
    2 sqrt(1 + 24 sqrt(M) e^{-n0 phi^2/2}) / (phi sqrt(n)) ||f||_inf, and the
    rule n0* = ceil(log M / phi^2) is checked to bring the rmse under
    10 ||f||_inf / (phi sqrt(n)) for every n. Instances whose burn-in would
    exceed the exact-path feasibility cap are redrawn (deterministically).
    """
    rng = np.random.default_rng(seed)
    check = CheckResult("general_start_error_bound", IDENTITY_TOL)
    rule_check = CheckResult("burn_in_rule", IDENTITY_TOL)
    produced = 0
    while produced < instances:
        size = int(rng.integers(2, s_max + 1))
        base, pi = random_reversible_pair(rng, size)
        kernel = lazify(base)
        nu = random_start_distribution(rng, pi)
        f = random_state_function(rng, size)
        phi = conductance_exact(kernel, pi).phi
        bound_m = density_bound(nu, pi)
        n0_star = burn_in(bound_m, phi)
        if n0_star > 300:
            continue  # keep the exact path cheap; redraw is deterministic
        produced += 1
        check.instances += 1
        rule_check.instances += 1
        f_sup = float(np.abs(f.values).max())

        grid = exact_mse_grid(kernel, pi, nu, f, n_max, n0_max)
        rmse = np.sqrt(np.maximum(grid, 0.0))
        ns = np.arange(1, n_max + 1, dtype=float)
        n0s = np.arange(0, n0_max + 1, dtype=float)
        penalties = 24.0 * math.sqrt(bound_m) * np.exp(-n0s * 0.5 * phi * phi)
        bounds_grid = (2.0 * np.sqrt(1.0 + penalties)[:, None] / (phi * np.sqrt(ns))[None, :]) * f_sup
        # the vectorized grid must agree with the public formula cell by cell
        for n_spot, n0_spot in ((1, 0), (n_max, n0_max), (n_max // 2 + 1, n0_max // 2)):
            spot = error_bound(phi, n_spot, n0_spot, bound_m, f_sup).error_bound
            assert abs(bounds_grid[n0_spot, n_spot - 1] - spot) <= 1e-12 * spot
        worst = float((rmse - bounds_grid).max())
        check.record(
            worst,
            lambda k=kernel, p=pi, nn=nu, ff=f, v=worst: {
                "chain": chain_to_json(k, p),
                "nu": nn.weights.tolist(),
                "f": ff.values.tolist(),
                "excess": v,
            },
        )

        # burn-in rule: advance nu by n0* steps, then the n0 = 0 column of the
        # grid is the exact mse at burn-in n0*
        advanced = nu.weights.copy()
        for _ in range(n0_star):
            advanced = advanced @ kernel.matrix
        nu_star = ProbabilityVector(advanced / advanced.sum())
        grid_star = exact_mse_grid(kernel, pi, nu_star, f, n_max, 0)
        rmse_star = np.sqrt(np.maximum(grid_star[0], 0.0))
        rule_bounds = 10.0 * f_sup / (phi * np.sqrt(ns))
        rule_worst = float((rmse_star - rule_bounds).max())
        rule_check.record(
            rule_worst,
            lambda k=kernel, p=pi, nn=nu, ff=f, v=rule_worst: {
                "chain": chain_to_json(k, p),
                "nu": nn.weights.tolist(),
                "f": ff.values.tolist(),
                "excess": v,
            },
        )
    return check, rule_check


def mse_decomposition_suite(seed=11, instances=50, s_max=8):
    """Both sides of the exact-error decomposition agree to 1e-10."""
    rng = np.random.default_rng(seed)
    check = CheckResult("mse_decomposition_identity", IDENTITY_TOL)
    for _ in range(instances):
        size = int(rng.integers(2, s_max + 1))
        base, pi = random_reversible_pair(rng, size)
        kernel = lazify(base)
        nu = random_start_distribution(rng, pi)
        f = random_state_function(rng, size)
        n = int(rng.integers(1, 31))
        n0 = int(rng.integers(0, 21))
        check.instances += 1
        lhs = exact_mse_discrete(kernel, pi, nu, f, n, n0)
        rhs = mse_decomposition_rhs(kernel, pi, nu, f, n, n0)
        residual = abs(lhs - rhs)
        check.record(
            residual,
            lambda k=kernel, p=pi, nn=nu, ff=f, a=n, b=n0, v=residual: {
                "chain": chain_to_json(k, p),
                "nu": nn.weights.tolist(),
                "f": ff.values.tolist(),
                "n": a,
                "n0": b,
                "residual": v,
            },
        )
    return check


def run_all(seed=0):
    """Run every verification suite with seeds derived from ``seed``."""
    results = [
        pair_swap_suite(seed + 0),
        stationary_average_suite(seed + 1),
        contraction_suite(seed + 2),
        lazy_psd_suite(seed + 3),
        cheeger_decay_suite(seed + 4),
        mixing_decay_suite(seed + 5),
        lazify_conductance_suite(seed + 6),
        metropolis_reversible_suite(seed + 7),
        lazify_order_suite(seed + 8),
        stationary_start_mse_suite(seed + 9),
    ]
    general, rule = general_start_mse_suite(seed + 10)
    results.extend([general, rule, mse_decomposition_suite(seed + 11)])
    return results
