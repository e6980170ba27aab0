"""Bound formulas against hand substitution and exact conductance against brute force."""

import itertools
import math

import numpy as np
import pytest

from lazymcmc import (
    DiscreteKernel,
    ProbabilityVector,
    ball_plan,
    ball_walk_burn_in,
    ball_walk_conductance_lower,
    ball_walk_sample_size,
    burn_in,
    cheeger_bound,
    conductance_exact,
    cost,
    error_bound,
    lazification_conductance,
    lazify,
    mixing_bound,
    mixing_bound_exp,
    random_reversible_pair,
    stationary_error_bound,
)


def brute_force_conductance(matrix, weights):
    """Independent subset-enumeration oracle using itertools."""
    size = len(weights)
    best = math.inf
    for r in range(1, size + 1):
        for subset in itertools.combinations(range(size), r):
            mass = sum(weights[i] for i in subset)
            if not 0.0 < mass <= 0.5 + 1e-12:
                continue
            flow = sum(
                weights[i] * matrix[i][j] for i in subset for j in range(size) if j not in subset
            )
            best = min(best, flow / mass)
    return best


def test_conductance_identity_kernel():
    result = conductance_exact(DiscreteKernel(np.eye(2)), ProbabilityVector([0.5, 0.5]))
    assert result.phi == 0.0
    assert result.witness_set == (0,)


def test_conductance_two_state_smooth():
    kernel = DiscreteKernel([[0.75, 0.25], [0.25, 0.75]])
    pi = ProbabilityVector([0.5, 0.5])
    result = conductance_exact(kernel, pi)
    assert result.phi == pytest.approx(0.25, abs=1e-15)
    assert result.phi == pytest.approx(brute_force_conductance(kernel.matrix, pi.weights), abs=1e-15)


def test_conductance_perfect_mixer():
    kernel = DiscreteKernel([[0.5, 0.5], [0.5, 0.5]])
    pi = ProbabilityVector([0.5, 0.5])
    assert conductance_exact(kernel, pi).phi == pytest.approx(0.5, abs=1e-15)


def test_conductance_matches_brute_force_on_random_chains():
    rng = np.random.default_rng(21)
    for _ in range(20):
        kernel, pi = random_reversible_pair(rng, int(rng.integers(2, 7)))
        fast = conductance_exact(kernel, pi)
        slow = brute_force_conductance(kernel.matrix.tolist(), pi.weights.tolist())
        assert fast.phi == pytest.approx(slow, abs=1e-13)


def test_conductance_witness_tie_break():
    # flip chain: both singletons attain phi = 1; lexicographic winner is (0,)
    result = conductance_exact(DiscreteKernel([[0.0, 1.0], [1.0, 0.0]]), ProbabilityVector([0.5, 0.5]))
    assert result.phi == pytest.approx(1.0, abs=1e-15)
    assert result.witness_set == (0,)


def test_conductance_chunked_enumeration_matches_single_pass(monkeypatch):
    # force many tiny chunks so the cross-chunk minimum/tie logic is exercised
    import lazymcmc.bounds as bounds_module

    rng = np.random.default_rng(26)
    cases = [random_reversible_pair(rng, int(rng.integers(2, 9))) for _ in range(15)]
    cases.append((DiscreteKernel([[0.0, 1.0], [1.0, 0.0]]), ProbabilityVector([0.5, 0.5])))
    cases.append((DiscreteKernel(np.eye(4)), ProbabilityVector([0.25] * 4)))
    baseline = [conductance_exact(kernel, pi) for kernel, pi in cases]
    monkeypatch.setattr(bounds_module, "ENUMERATION_CHUNK", 7)
    for (kernel, pi), expected in zip(cases, baseline):
        chunked = conductance_exact(kernel, pi)
        assert chunked.phi == expected.phi
        assert chunked.witness_set == expected.witness_set


def test_conductance_single_state_convention():
    result = conductance_exact(DiscreteKernel([[1.0]]), ProbabilityVector([1.0]))
    assert result.phi == 1.0
    assert result.by_convention
    assert result.witness_set is None


def test_conductance_state_cap():
    size = 21
    with pytest.raises(ValueError):
        conductance_exact(DiscreteKernel(np.eye(size)), ProbabilityVector(np.full(size, 1 / size)))


def test_conductance_requires_stationarity():
    kernel = DiscreteKernel([[0.5, 0.5], [0.25, 0.75]])
    with pytest.raises(ValueError):
        conductance_exact(kernel, ProbabilityVector([0.5, 0.5]))


def test_lazification_conductance():
    assert lazification_conductance(0.0) == 0.0
    assert lazification_conductance(1.0) == 0.5
    assert lazification_conductance(0.25) == 0.125
    with pytest.raises(ValueError):
        lazification_conductance(1.5)


def test_lazification_halves_exact_conductance():
    rng = np.random.default_rng(22)
    for _ in range(25):
        kernel, pi = random_reversible_pair(rng, int(rng.integers(2, 8)))
        phi = conductance_exact(kernel, pi).phi
        phi_lazy = conductance_exact(lazify(kernel), pi).phi
        assert abs(phi_lazy - 0.5 * phi) <= 1e-12


def test_mixing_bound_values():
    assert mixing_bound(0.7, 1.0, 0) == 1.0
    assert mixing_bound(1.0, 4.0, 1) == pytest.approx(1.0, abs=1e-15)
    assert mixing_bound(0.25, 1.0, 2) == pytest.approx(0.9384765625, abs=1e-15)
    with pytest.raises(ValueError):
        mixing_bound(0.5, 0.5, 1)


def test_mixing_bound_exact_below_relaxation():
    rng = np.random.default_rng(23)
    for _ in range(200):
        phi = rng.uniform(0.0, 1.0)
        m = rng.uniform(1.0, 50.0)
        j = int(rng.integers(0, 100))
        assert mixing_bound(phi, m, j) <= mixing_bound_exp(phi, m, j) + 1e-15


def test_cheeger_bound_values():
    assert cheeger_bound(0.3, 0, 2.5) == 2.5
    assert cheeger_bound(1.0, 3, 8.0) == pytest.approx(1.0, abs=1e-15)
    assert cheeger_bound(0.5, 1, 1.0) == pytest.approx(0.875, abs=1e-15)


def test_stationary_error_bound_values():
    assert stationary_error_bound(1.0, 4, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert stationary_error_bound(0.5, 100, 1.0) == pytest.approx(0.4, abs=1e-15)
    assert stationary_error_bound(0.5, 100, 0.0) == 0.0
    with pytest.raises(ValueError):
        stationary_error_bound(0.0, 10, 1.0)


def test_error_bound_limits():
    # huge burn-in: the start penalty vanishes
    report = error_bound(0.5, 100, 10**9, 50.0, 1.0)
    assert report.error_bound == pytest.approx(2.0 / (0.5 * 10.0), rel=1e-12)
    # no burn-in, stationary-bounded start: 2 sqrt(25) = 10
    report = error_bound(0.5, 100, 0, 1.0, 1.0)
    assert report.start_penalty == pytest.approx(24.0, abs=1e-15)
    assert report.error_bound == pytest.approx(10.0 / (0.5 * 10.0), rel=1e-12)
    # the worked substitution: phi = 0.25, n = 10^4, penalty <= 1e-6
    report = error_bound(0.25, 10**4, 600, 1.0, 1.0)
    assert report.start_penalty <= 1e-6
    assert report.error_bound == pytest.approx(0.08, abs=1e-8)
    assert report.cost_total == 10**4 + 600


def test_error_bound_monotonicity():
    rng = np.random.default_rng(24)
    for _ in range(100):
        phi = rng.uniform(0.05, 1.0)
        n = int(rng.integers(1, 1000))
        n0 = int(rng.integers(0, 500))
        m = rng.uniform(1.0, 100.0)
        base = error_bound(phi, n, n0, m, 1.0).error_bound
        assert error_bound(phi, n, n0 + 1, m, 1.0).error_bound <= base
        assert error_bound(phi, n + 1, n0, m, 1.0).error_bound <= base
        assert error_bound(phi, n, n0, m + 1.0, 1.0).error_bound >= base


def test_start_penalty_threshold():
    rng = np.random.default_rng(25)
    for _ in range(100):
        phi = rng.uniform(0.1, 1.0)
        m = rng.uniform(1.5, 100.0)
        threshold = math.log(m) / (phi * phi)
        above = error_bound(phi, 10, int(math.ceil(threshold)), m, 1.0)
        assert above.start_penalty <= 24.0 + 1e-9
        below = error_bound(phi, 10, int(math.floor(threshold) - 1), m, 1.0)
        assert below.start_penalty > 24.0


def test_burn_in_values():
    assert burn_in(1.0, 0.7) == 0
    assert burn_in(math.exp(4.0), 0.5) == 16
    assert burn_in(math.exp(2.0), 0.1) == 200
    with pytest.raises(ValueError):
        burn_in(0.5, 0.5)
    with pytest.raises(ValueError):
        burn_in(2.0, 0.0)


def test_cost_values():
    assert cost(1.0, 1.0, 1.0, 10.0) == 1
    assert cost(math.exp(2.0), 0.1, 1.0, 0.1) == 200 + 1_000_000
    assert cost(math.exp(2.0), 0.1, 0.0, 0.1) == 200
    with pytest.raises(ValueError):
        cost(1.0, 1.0, 1.0, 0.0)


def test_ball_walk_conductance_lower_values():
    assert ball_walk_conductance_lower(3, 2.0) == 0.000625
    assert ball_walk_conductance_lower(8, 1.0) == pytest.approx(0.0025 / 9.0, rel=1e-12)
    assert ball_walk_conductance_lower(3, 0.0) == 0.000625


def test_ball_plan_examples():
    plan = ball_plan(3, 2.0, 10**6)
    assert plan.delta == 0.5
    assert plan.n0 == 40_960_000
    assert plan.headline_error_bound == pytest.approx(32.0, rel=1e-12)
    assert plan.cost_total == 10**6 + 40_960_000

    plan = ball_plan(2, 0.0, 10**4)
    assert plan.delta == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-15)
    assert plan.n0 == 0
    assert plan.headline_error_bound == pytest.approx(240.0, rel=1e-12)

    plan = ball_plan(1, 1.0, 4)
    assert plan.delta == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-15)
    assert plan.n0 == 5_120_000


def test_ball_plan_headline_bound_dominates_composed():
    for d in range(1, 11):
        for alpha in (0.0, 0.5, 1.0, 2.0, 4.0, 8.5):
            for n in (10, 10**4, 10**8):
                plan = ball_plan(d, alpha, n)
                assert plan.headline_error_bound >= plan.composed.error_bound - 1e-12 * plan.headline_error_bound


def test_ball_walk_sample_size():
    # eps = 0.1, d = 3, alpha = 2: 64e6 * 4 * 4 * 100
    assert ball_walk_sample_size(3, 2.0, 0.1) == 102_400_000_000
    assert ball_walk_sample_size(2, 0.0, 1.0) == 576_000_000
    with pytest.raises(ValueError):
        ball_walk_sample_size(2, 0.0, 0.0)


def test_burn_in_term_matches_ball_walk_burn_in():
    for d, alpha in ((1, 1.0), (2, 0.0), (3, 2.0), (5, 3.5)):
        plan = ball_plan(d, alpha, 100)
        assert plan.n0 == ball_walk_burn_in(d, alpha)
