"""Running the burn-in average estimator and measuring its error.

Covers four jobs: realizing the estimator S = (1/n) sum f(X_{n0+j}) with the
lazy Metropolis ball walk, replicating it to measure empirical root-mean-
square error against a reference value, computing the EXACT mean-square
error of the analogous estimator on a finite chain through matrix powers,
and producing reference integral values by quadrature (d <= 3) or plain
Monte Carlo (larger d).

Chain indexing: a run draws X_0 from the start distribution, performs
n0 + n transitions, and averages f over the states X_{n0+1}, ..., X_{n0+n}
(one transition before each recorded state), so the total step count is
exactly n + n0. Replication r of a run with seed s uses seed s + r, and
every run is a pure function of its parameters and seed (bit-identical on
repetition).
"""

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import _fastpath
from .bounds import ball_walk_conductance_lower, error_bound, lazification_conductance
from .chain import IDENTITY_TOL, check_stationarity
from .densities import (
    DENSITY_EXPLIN,
    DENSITY_GAUSS,
    DENSITY_UNIFORM,
    INTEGRAND_COORD,
    INTEGRAND_COORD2,
    INTEGRAND_HALFSPACE,
    INTEGRAND_ONE,
    DensityEvaluationError,
)
from .walk import StepCounters, WalkConfig, _lazy_step_memo, delta_choice, uniform_ball_sample

# Feasibility caps for the exact finite-chain error path.
EXACT_MSE_MAX_STATES = 8
EXACT_MSE_MAX_STEPS = 500

QUAD_MAX_DIMENSION = 3
QUAD_REL_TARGET = 1e-6
MC_DRAWS = 10**7
MC_BATCH = 10**6
MC_DEFAULT_SEED = 0


@dataclass(frozen=True)
class ChainRun:
    """One realized estimator value with its provenance."""

    estimate: float
    n: int
    n0: int
    seed: int
    steps_total: int
    rho_evaluations: int
    delta: float

    def to_dict(self):
        return {
            "estimate": self.estimate,
            "n": self.n,
            "n0": self.n0,
            "seed": self.seed,
            "steps_total": self.steps_total,
            "rho_evaluations": self.rho_evaluations,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class MseReport:
    """Measured root-mean-square error against the certified theoretical bound.

    ``margin`` is bound minus rmse; statistically a passing configuration may
    dip to margin >= -3 * rmse_standard_error since the bound constrains the
    true expectation, not its estimate.
    """

    empirical_rmse: float
    theoretical_bound: float
    replications: int
    reference_value: float
    margin: float
    rmse_standard_error: float
    estimate_mean: float

    def to_dict(self):
        return {
            "empirical_rmse": self.empirical_rmse,
            "theoretical_bound": self.theoretical_bound,
            "replications": self.replications,
            "reference_value": self.reference_value,
            "margin": self.margin,
            "rmse_standard_error": self.rmse_standard_error,
            "estimate_mean": self.estimate_mean,
        }


@dataclass(frozen=True)
class ReferenceValue:
    """A reference integral with an accuracy report."""

    value: float
    error_estimate: float
    method: str
    converged: bool

    def to_dict(self):
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "method": self.method,
            "converged": self.converged,
        }


def run_chain(rho, f, n, n0, seed, delta=None):
    """Run the lazy Metropolis ball walk and return the estimator value.

    The start state is uniform on the ball, delta defaults to the tuned
    radius for (dimension, alpha), and the result is deterministic given the
    seed. Density failures abort with the step index attached.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n0 < 0:
        raise ValueError("n0 must be >= 0")
    if f.dimension != rho.dimension:
        raise ValueError("integrand and density dimensions differ")
    d = rho.dimension
    if delta is None:
        delta = delta_choice(d, rho.alpha)
    WalkConfig(d, delta, seed)  # validates the (dimension, delta) pair
    rng = np.random.default_rng(seed)
    x = uniform_ball_sample(d, rng)

    if _fastpath.supports(rho, f):
        estimate, evals = _fastpath.run_compiled(rng, x, delta, n0, n, rho, f)
    else:
        counters = StepCounters()
        try:
            log_rho_x = rho.log_density_checked(x)
        except DensityEvaluationError as exc:
            raise DensityEvaluationError(f"step 0 (initial state): {exc}") from exc
        counters.rho_evaluations += 1
        total = 0.0
        for step in range(1, n0 + n + 1):
            try:
                x, log_rho_x = _lazy_step_memo(x, log_rho_x, rho, delta, rng, counters)
            except DensityEvaluationError as exc:
                raise DensityEvaluationError(f"step {step}: {exc}") from exc
            if step > n0:
                total += f(x)
        estimate = total / n
        evals = counters.rho_evaluations

    return ChainRun(
        estimate=float(estimate),
        n=int(n),
        n0=int(n0),
        seed=int(seed),
        steps_total=int(n) + int(n0),
        rho_evaluations=int(evals),
        delta=float(delta),
    )


def run_replications(rho, f, n, n0, seed, replications, delta=None, jobs=None):
    """Run ``replications`` independent chains with seeds seed + r.

    Each replication owns its RNG stream, so results are independent of the
    worker pool's scheduling; the returned list is ordered by replication
    index.
    """
    if replications < 1:
        raise ValueError("replications must be >= 1")
    workers = jobs if jobs and jobs > 0 else (os.cpu_count() or 1)
    if workers == 1 or replications == 1:
        return [run_chain(rho, f, n, n0, seed + r, delta) for r in range(replications)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_chain, rho, f, n, n0, seed + r, delta) for r in range(replications)]
        return [fut.result() for fut in futures]


def summarize_replications(runs, reference, rho, f):
    """Aggregate replicated runs into an MseReport with the certified bound.

    The theoretical bound is the general-start error bound evaluated at the
    certified lazy-chain conductance lower bound for (dimension, alpha) and
    the uniform-start density bound exp(2 alpha).
    """
    if len(runs) < 2:
        raise ValueError("need at least 2 replications to measure the error")
    estimates = np.array([run.estimate for run in runs])
    sq = (estimates - reference) ** 2
    mean_sq = float(sq.mean())
    rmse = math.sqrt(mean_sq)
    se_mean_sq = float(sq.std(ddof=1)) / math.sqrt(len(runs))
    se_rmse = se_mean_sq / (2.0 * rmse) if rmse > 0.0 else 0.0

    phi_cert = lazification_conductance(ball_walk_conductance_lower(rho.dimension, rho.alpha))
    bound = error_bound(phi_cert, runs[0].n, runs[0].n0, math.exp(2.0 * rho.alpha), f.sup_norm).error_bound
    return MseReport(
        empirical_rmse=rmse,
        theoretical_bound=bound,
        replications=len(runs),
        reference_value=float(reference),
        margin=bound - rmse,
        rmse_standard_error=se_rmse,
        estimate_mean=float(estimates.mean()),
    )


def empirical_mse(rho, f, n, n0, seed, replications, reference, delta=None, jobs=None):
    """Replicate the estimator and report empirical rmse vs the certified bound."""
    if replications < 2:
        raise ValueError("replications must be >= 2")
    runs = run_replications(rho, f, n, n0, seed, replications, delta, jobs)
    return summarize_replications(runs, reference, rho, f)


def _exact_mse_inputs(kernel, pi, nu, f, n, n0):
    if n < 1:
        raise ValueError("n must be >= 1")
    if n0 < 0:
        raise ValueError("n0 must be >= 0")
    if kernel.size > EXACT_MSE_MAX_STATES:
        raise ValueError(f"exact error path supports at most {EXACT_MSE_MAX_STATES} states")
    if n + n0 > EXACT_MSE_MAX_STEPS:
        raise ValueError(f"exact error path supports at most n + n0 = {EXACT_MSE_MAX_STEPS} steps")
    if not check_stationarity(kernel, pi, IDENTITY_TOL):
        raise ValueError("pi is not stationary for the kernel")
    if nu.size != pi.size or f.size != pi.size:
        raise ValueError("dimension mismatch")


def exact_mse_discrete(kernel, pi, nu, f, n, n0):
    """Exact mean-square error of the burn-in average on a finite chain.

    Evaluates the defining covariance double sum
    (1/n^2) sum_{i,j} E[g(X_{n0+i}) g(X_{n0+j})] with g = f - mean(f) through
    matrix powers: the pair expectation for i <= j is the a-step distribution
    nu K^a (a = n0 + i) applied to g * (K^{j-i} g).
    """
    _exact_mse_inputs(kernel, pi, nu, f, n, n0)
    K = kernel.matrix
    s = kernel.size
    g = f.values - float(pi.weights @ f.values)

    powers_g = np.empty((n, s))
    powers_g[0] = g
    for m in range(1, n):
        powers_g[m] = K @ powers_g[m - 1]
    gh = g[None, :] * powers_g  # gh[m] = g * (K^m g)
    # cumulative[M] = sum_{m=1..M} gh[m]
    cumulative = np.zeros((n, s))
    if n > 1:
        cumulative[1:] = np.cumsum(gh[1:], axis=0)

    diag_sum = 0.0
    cross_sum = 0.0
    dist = nu.weights
    for a in range(1, n0 + n + 1):
        dist = dist @ K
        i = a - n0
        if i >= 1:
            diag_sum += float(dist @ gh[0])
            cross_sum += float(dist @ cumulative[n - i])
    return (diag_sum + 2.0 * cross_sum) / (n * n)


def exact_mse_grid(kernel, pi, nu, f, n_max, n0_max):
    """Exact mean-square errors for every (n, n0) in [1, n_max] x [0, n0_max].

    Returns an array of shape (n0_max + 1, n_max) with entry [n0, n - 1]
    equal to exact_mse_discrete(kernel, pi, nu, f, n, n0); one pair-
    expectation table is shared across the whole grid.
    """
    _exact_mse_inputs(kernel, pi, nu, f, n_max, n0_max)
    K = kernel.matrix
    s = kernel.size
    g = f.values - float(pi.weights @ f.values)

    powers_g = np.empty((n_max, s))
    powers_g[0] = g
    for m in range(1, n_max):
        powers_g[m] = K @ powers_g[m - 1]
    gh = g[None, :] * powers_g

    a_max = n0_max + n_max
    dists = np.empty((a_max, s))
    dist = nu.weights
    for a in range(a_max):
        dist = dist @ K
        dists[a] = dist

    # pair_table[a - 1, m] = E[g(X_a) g(X_{a+m})]
    pair_table = dists @ gh.T
    prefixes = np.zeros_like(pair_table)
    if n_max > 1:
        prefixes[:, 1:] = np.cumsum(pair_table[:, 1:], axis=1)

    ns = np.arange(1, n_max + 1, dtype=float)
    out = np.empty((n0_max + 1, n_max))
    for n0 in range(n0_max + 1):
        diag_cum = np.cumsum(pair_table[n0 : n0 + n_max, 0])
        flipped = np.fliplr(prefixes[n0 : n0 + n_max, :])
        cross = np.array([np.trace(flipped, offset=n_max - n) for n in range(1, n_max + 1)])
        out[n0] = (diag_cum + 2.0 * cross) / (ns * ns)
    return out


def stationary_mse_curve(kernel, pi, f, n_max):
    """Exact mean-square errors for the stationary start, all n in [1, n_max].

    Uses the stationary pair expectation <g, K^k g>_pi, so it shares no code
    path with the general-start double sum (useful as an independent side of
    the decomposition identity).
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if kernel.size > EXACT_MSE_MAX_STATES:
        raise ValueError(f"exact error path supports at most {EXACT_MSE_MAX_STATES} states")
    if not check_stationarity(kernel, pi, IDENTITY_TOL):
        raise ValueError("pi is not stationary for the kernel")
    K = kernel.matrix
    g = f.values - float(pi.weights @ f.values)
    corr = np.empty(n_max)
    h = g.copy()
    corr[0] = float(np.sum(pi.weights * g * h))
    for k in range(1, n_max):
        h = K @ h
        corr[k] = float(np.sum(pi.weights * g * h))
    ns = np.arange(1, n_max + 1, dtype=float)
    weighted = corr * np.arange(n_max)  # k * c_k
    sum_c = np.concatenate([[0.0], np.cumsum(corr[1:])])
    sum_kc = np.concatenate([[0.0], np.cumsum(weighted[1:])])
    return (ns * corr[0] + 2.0 * (ns * sum_c - sum_kc)) / (ns * ns)


def mse_decomposition_rhs(kernel, pi, nu, f, n, n0):
    """The stationary + start-correction side of the exact-error decomposition.

    stationary MSE at n, plus (1/n^2) sum_j <g^2, w_{n0+j}>_pi and
    (2/n^2) sum_{j<k} <g K^{k-j} g, w_{n0+j}>_pi, where
    w_i(x) = (K^i (nu/pi))(x) - 1 measures the start distribution's
    i-step distance from stationarity. Computed independently of
    exact_mse_discrete (different recursion), so agreement is a real check.
    """
    _exact_mse_inputs(kernel, pi, nu, f, n, n0)
    if pi.weights.min() <= 0.0:
        raise ValueError("pi must be strictly positive for the density nu/pi")
    K = kernel.matrix
    s = kernel.size
    g = f.values - float(pi.weights @ f.values)

    stationary = float(stationary_mse_curve(kernel, pi, f, n)[n - 1])

    powers_g = np.empty((n, s))
    powers_g[0] = g
    for m in range(1, n):
        powers_g[m] = K @ powers_g[m - 1]
    # tail_sums[M] = sum_{m=1..M} K^m g
    tail_sums = np.zeros((n, s))
    if n > 1:
        tail_sums[1:] = np.cumsum(powers_g[1:], axis=0)

    ratio = nu.weights / pi.weights
    w = ratio.copy()
    for _ in range(n0):
        w = K @ w
    term2 = 0.0
    term3 = 0.0
    for j in range(1, n + 1):
        w = K @ w  # now w = K^{n0+j} ratio
        deviation = w - 1.0
        term2 += float(np.sum(pi.weights * g * g * deviation))
        if j <= n - 1:
            term3 += float(np.sum(pi.weights * g * tail_sums[n - j] * deviation))
    return stationary + term2 / (n * n) + 2.0 * term3 / (n * n)


def simulate_discrete_estimator(kernel, nu, f, n, n0, rng, trajectories):
    """Simulate the burn-in average on a finite chain, vectorized over runs.

    Returns one estimator value per trajectory (X_0 ~ nu, n0 + n transitions,
    averaging f over the last n states) for cross-checking the exact error.
    """
    if trajectories < 1:
        raise ValueError("trajectories must be >= 1")
    cum_rows = np.cumsum(kernel.matrix, axis=1)
    cum_rows[:, -1] = 1.0
    start_cum = np.cumsum(nu.weights)
    start_cum[-1] = 1.0
    state = np.searchsorted(start_cum, rng.random(trajectories), side="right")
    totals = np.zeros(trajectories)
    for step in range(1, n0 + n + 1):
        u = rng.random(trajectories)
        state = (u[:, None] > cum_rows[state]).sum(axis=1)
        if step > n0:
            totals += f.values[state]
    return totals / n


def _nested_ball_ranges(d, order, clip_axis=None, clip_upper=None):
    """nquad range callables for the unit ball with axes integrated in ``order``.

    order[0] is innermost. Optionally clips the upper limit of ``clip_axis``
    at ``clip_upper`` (for halfspace indicators).
    """

    def make_range(pos):
        outer_positions = range(pos + 1, d)

        def ranges(*outer_args):
            # outer_args correspond to order[pos+1:], innermost-first convention
            available = 1.0
            for arg_index, _ in enumerate(outer_positions):
                available -= outer_args[arg_index] ** 2
            available = max(available, 0.0)
            half = math.sqrt(available)
            lo, hi = -half, half
            if clip_axis is not None and order[pos] == clip_axis:
                hi = min(hi, clip_upper)
                if hi < lo:
                    hi = lo
            return (lo, hi)

        return ranges

    return [make_range(pos) for pos in range(d)]


def _nquad_ball(point_fn, d, clip_axis=None, clip_upper=None):
    order = list(range(d))
    if clip_axis is not None:
        order = [clip_axis] + [axis for axis in range(d) if axis != clip_axis]

    def integrand(*args):
        point = np.empty(d)
        for pos, axis in enumerate(order):
            point[axis] = args[pos]
        return point_fn(point)

    ranges = _nested_ball_ranges(d, order, clip_axis, clip_upper)
    opts = [{"epsabs": 1e-12, "epsrel": 1e-10, "limit": 200}] * d
    return integrate.nquad(integrand, ranges, opts=opts)


def reference_integral(rho, f, mc_seed=MC_DEFAULT_SEED, mc_draws=MC_DRAWS):
    """Reference value of the weighted mean integral of f under rho.

    Dimensions up to 3 use nested adaptive quadrature over the ball (relative
    target 1e-6; the report flags non-convergence); larger dimensions use
    plain uniform Monte Carlo with ``mc_draws`` draws and report the ratio
    estimator's standard error.
    """
    d = rho.dimension
    if f.dimension != d:
        raise ValueError("integrand and density dimensions differ")
    if d <= QUAD_MAX_DIMENSION:
        return _reference_quad(rho, f, d)
    return _reference_monte_carlo(rho, f, d, mc_seed, mc_draws)


def _reference_quad(rho, f, d):
    def weight(point):
        return math.exp(rho.log_density_checked(point))

    if f.kind == INTEGRAND_HALFSPACE:
        clip_axis, clip_upper = int(f.params[0]), float(f.params[1])
        numerator, err_num = _nquad_ball(weight, d, clip_axis, clip_upper)
    else:
        numerator, err_num = _nquad_ball(lambda point: f(point) * weight(point), d)
    denominator, err_den = _nquad_ball(weight, d)
    value = numerator / denominator
    err = (err_num + abs(value) * err_den) / abs(denominator)
    converged = err <= max(QUAD_REL_TARGET * abs(value), 1e-9)
    return ReferenceValue(float(value), float(err), "quadrature", bool(converged))


def _density_values(rho, points):
    if rho.kind == DENSITY_UNIFORM:
        return np.ones(points.shape[0])
    if rho.kind == DENSITY_EXPLIN:
        return np.exp(points @ np.asarray(rho.params))
    if rho.kind == DENSITY_GAUSS:
        return np.exp(-float(rho.params[0]) * np.sum(points * points, axis=1))
    return np.array([math.exp(rho.log_density_checked(p)) for p in points])


def _integrand_values(f, points):
    if f.kind == INTEGRAND_ONE:
        return np.ones(points.shape[0])
    if f.kind == INTEGRAND_COORD:
        return points[:, int(f.params[0])]
    if f.kind == INTEGRAND_COORD2:
        col = points[:, int(f.params[0])]
        return col * col
    if f.kind == INTEGRAND_HALFSPACE:
        return (points[:, int(f.params[0])] <= float(f.params[1])).astype(float)
    return np.array([f(p) for p in points])


def _reference_monte_carlo(rho, f, d, seed, draws):
    rng = np.random.default_rng(seed)
    sum_w = 0.0
    sum_fw = 0.0
    sq_accum = []
    remaining = draws
    while remaining > 0:
        batch = min(MC_BATCH, remaining)
        remaining -= batch
        z = rng.standard_normal((batch, d))
        norms = np.sqrt(np.sum(z * z, axis=1))
        radii = rng.random(batch) ** (1.0 / d)
        points = z * (radii / norms)[:, None]
        w = _density_values(rho, points)
        fw = _integrand_values(f, points) * w
        sum_w += float(w.sum())
        sum_fw += float(fw.sum())
        sq_accum.append((w, fw))
    value = sum_fw / sum_w
    mean_w = sum_w / draws
    # delta-method variance of the ratio estimator
    residual_sq = 0.0
    for w, fw in sq_accum:
        residual_sq += float(np.sum((fw - value * w) ** 2))
    se = math.sqrt(residual_sq / draws) / (mean_w * math.sqrt(draws))
    return ReferenceValue(float(value), float(se), "monte-carlo", True)


# --- serialization -----------------------------------------------------------

JSON_SIGNIFICANT_DIGITS = 12
CSV_SIGNIFICANT_DIGITS = 9
BATCH_CSV_COLUMNS = ("d", "alpha", "delta", "n", "n0", "seed", "estimate", "reference", "rmse", "bound", "margin")


def _rounded(value, digits):
    return float(f"{value:.{digits}g}")


def json_ready(obj, digits=JSON_SIGNIFICANT_DIGITS):
    """Recursively convert reports to JSON-safe values with fixed precision."""
    if hasattr(obj, "to_dict"):
        return json_ready(obj.to_dict(), digits)
    if isinstance(obj, dict):
        return {key: json_ready(val, digits) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(val, digits) for val in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _rounded(float(obj), digits)
    if isinstance(obj, np.ndarray):
        return [json_ready(val, digits) for val in obj.tolist()]
    return obj


def format_json(obj):
    """Serialize a report to JSON with 12-significant-digit floats."""
    return json.dumps(json_ready(obj), indent=2, sort_keys=True) + "\n"


def write_batch_csv(handle, rows, header=True):
    """Write batch rows to CSV: fixed header, '.' decimals, LF line endings."""
    writer = csv.writer(handle, lineterminator="\n")
    if header:
        writer.writerow(BATCH_CSV_COLUMNS)
    for row in rows:
        formatted = []
        for col in BATCH_CSV_COLUMNS:
            value = row[col]
            if isinstance(value, (float, np.floating)):
                formatted.append(f"{float(value):.{CSV_SIGNIFICANT_DIGITS}g}")
            else:
                formatted.append(value)
        writer.writerow(formatted)


def append_batch_csv(path, rows):
    """Append batch rows to a CSV file, writing the header when the file is new."""
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", encoding="utf-8", newline="") as handle:
        write_batch_csv(handle, rows, header=fresh)
