"""Acceptance suite: one test per exit criterion, each printing a PASS line.

Criteria 1-7 and 9 are exact (matrix oracles and closed-form substitution,
zero statistical slack beyond the stated 1e-10/1e-12 float tolerances);
criterion 8 is the desk-scale statistical run with fixed seeds, so its
outcome is deterministic. Run with ``pytest -s tests/test_acceptance.py``
to see the per-criterion lines.
"""

import math
import time

import pytest

from lazymcmc import (
    ball_plan,
    ball_walk_conductance_lower,
    delta_choice,
    empirical_mse,
    parse_density,
    parse_integrand,
    reference_integral,
)
from lazymcmc import verify as suites

SEED = 20240901

# pinned by Bessel-reduction quadrature before the build (see test_estimator)
EXPLIN_DISK_COORD_MEAN = 0.24019372387008975


def _assert_clean(*checks):
    for check in checks:
        assert check.passed, f"{check.name}: {check.violations[:1]}"


def test_criterion_1_exact_identity_battery():
    started = time.time()
    swap = suites.pair_swap_suite(SEED, chains=200)
    stationary = suites.stationary_average_suite(SEED + 1, chains=200)
    contraction = suites.contraction_suite(SEED + 2, chains=200)
    psd = suites.lazy_psd_suite(SEED + 3, chains=200)
    elapsed = time.time() - started
    _assert_clean(swap, stationary, contraction, psd)
    assert swap.instances >= 200 and psd.instances >= 200
    assert elapsed < 60.0
    print(
        f"PASS criterion 1: swap/stationarity/contraction to 1e-10 and operator PSD over "
        f"{psd.instances} lazified chains in {elapsed:.1f}s"
    )


def test_criterion_2_cheeger_and_mixing():
    cheeger = suites.cheeger_decay_suite(SEED + 4, chains=200, j_max=50, funcs=20)
    mixing = suites.mixing_decay_suite(SEED + 5, chains=200, j_max=50)
    _assert_clean(cheeger, mixing)
    print(
        f"PASS criterion 2: correlation decay ({cheeger.comparisons} comparisons) and "
        f"exhaustive-subset mixing ({mixing.comparisons} comparisons) within bounds + 1e-10"
    )


def test_criterion_3_stationary_start_bound():
    check = suites.stationary_start_mse_suite(SEED + 9, chains=30, n_max=200, funcs=20)
    _assert_clean(check)
    print(
        f"PASS criterion 3: stationary-start rmse <= 2||f||_2/(phi sqrt(n)) for n in 1..200, "
        f"{check.comparisons} function curves, zero violations"
    )


def test_criterion_4_general_start_and_burn_in_rule():
    general, rule = suites.general_start_mse_suite(SEED + 10, instances=100, n_max=100, n0_max=50)
    _assert_clean(general, rule)
    assert general.instances >= 100
    print(
        f"PASS criterion 4: general-start rmse under the explicit bound on the full "
        f"(n <= 100) x (n0 <= 50) grid for {general.instances} instances; burn-in rule gives "
        f"rmse <= 10||f||_inf/(phi sqrt(n)), zero violations"
    )


def test_criterion_5_decomposition_identity():
    check = suites.mse_decomposition_suite(SEED + 11, instances=50)
    _assert_clean(check)
    assert check.instances >= 50
    print(
        f"PASS criterion 5: both sides of the error decomposition agree to 1e-10 on "
        f"{check.instances} instances (worst {check.worst:.2e})"
    )


def test_criterion_6_discrete_metropolis_exactness():
    reversible = suites.metropolis_reversible_suite(SEED + 7, instances=200)
    commute = suites.lazify_order_suite(SEED + 8, instances=200)
    halving = suites.lazify_conductance_suite(SEED + 6, chains=200)
    _assert_clean(reversible, commute, halving)
    assert reversible.instances >= 200
    print(
        "PASS criterion 6: Metropolis reversibility, lazification-order equivalence, and "
        "exact conductance halving all within 1e-12 over 200 instances each"
    )


def test_criterion_7_ball_walk_formulas():
    assert ball_walk_conductance_lower(3, 2.0) == 0.000625
    assert delta_choice(3, 2.0) == 0.5
    plan = ball_plan(3, 2.0, 10**6)
    assert plan.n0 == 40_960_000
    assert plan.headline_error_bound == pytest.approx(32.0, rel=1e-12)
    print("PASS criterion 7: conductance lower bound 0.000625, delta 0.5, burn-in 40960000")


def test_criterion_8_desk_scale_integration():
    # uniform density on the disk: alpha = 0 so the planned burn-in is 0
    rho = parse_density("uniform", 2)
    f = parse_integrand("coord2:1", 2)
    assert ball_plan(2, 0.0, 10**6).n0 == 0
    reference = reference_integral(rho, f)
    assert reference.value == pytest.approx(0.25, rel=1e-6)

    report = empirical_mse(rho, f, n=10**6, n0=0, seed=SEED, replications=100, reference=reference.value)
    assert report.empirical_rmse <= 0.01
    assert report.empirical_rmse <= report.theoretical_bound
    assert abs(report.estimate_mean - 0.25) <= 0.005

    # exp(x_1) on the disk: alpha = 1; mean of x_1 against the pinned reference
    rho_lin = parse_density("explin:1,0", 2)
    f_lin = parse_integrand("coord:1", 2)
    quarter = empirical_mse(
        rho_lin, f_lin, n=250_000, n0=20_000, seed=SEED + 1, replications=100,
        reference=EXPLIN_DISK_COORD_MEAN,
    )
    full = empirical_mse(
        rho_lin, f_lin, n=1_000_000, n0=20_000, seed=SEED + 2, replications=100,
        reference=EXPLIN_DISK_COORD_MEAN,
    )
    scatter = full.empirical_rmse / math.sqrt(full.replications)
    assert abs(full.estimate_mean - EXPLIN_DISK_COORD_MEAN) <= 3.0 * scatter
    ratio = quarter.empirical_rmse / full.empirical_rmse
    assert 1.6 <= ratio <= 2.5
    print(
        f"PASS criterion 8: uniform rmse {report.empirical_rmse:.4f} <= 0.01 (bound "
        f"{report.theoretical_bound:.1f}), mean {report.estimate_mean:.4f} ~ 0.25; explin mean "
        f"{full.estimate_mean:.5f} ~ {EXPLIN_DISK_COORD_MEAN:.5f}, rmse ratio {ratio:.2f} in [1.6, 2.5]"
    )


def test_criterion_9_headline_constants_not_reproduced_tightly():
    # The headline-constant bound is accepted through the formula checks of
    # criterion 7 plus this property: it never undercuts the composed bound
    # (same conductance and start-density inputs through the general bound),
    # so running the 4e7-step configuration would only confirm a vacuously
    # loose constant.
    worst_gap = math.inf
    for d in range(1, 11):
        for alpha in (0.0, 0.25, 1.0, 2.0, 5.0, 9.0):
            for n in (1, 100, 10**6, 10**10):
                plan = ball_plan(d, alpha, n)
                gap = plan.headline_error_bound - plan.composed.error_bound
                assert gap >= -1e-12 * plan.headline_error_bound
                worst_gap = min(worst_gap, gap)
    print(
        f"PASS criterion 9: headline bound dominates the composed bound across the grid "
        f"(smallest slack {worst_gap:.3e}); constants accepted via formula checks, not experiment"
    )
