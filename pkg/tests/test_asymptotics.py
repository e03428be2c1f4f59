"""Double-scaling layer: series tables, scaled flows, scans, experiments."""

from fractions import Fraction

import pytest
from mpmath import mp, mpf

from hankelpv.asymptotics import (
    FIXED_KINDS,
    ORDER_SMALL_SEED,
    SEED_EXPLICIT,
    SEED_LARGE_SERIES,
    SEED_SMALL_SERIES,
    SERIES_KINDS,
    c_constant,
    continue_pv,
    double_scaling_scan,
    dyson_constant_experiment,
    dyson_reference,
    g_large_coefficients,
    g_small_coefficients,
    log_ratio_small_coefficients,
    pv_residual_rows,
    series_eval,
    series_expansion,
    sigma_form_residual,
    solve_piii_prime,
)
from hankelpv.precision import PrecisionConfig, working_precision
from hankelpv.special import UnsupportedArgumentError
from hankelpv.weights import make_params

CFG = PrecisionConfig()
LO = PrecisionConfig(bits=256, target_digits=30)
HALF = Fraction(1, 2)


# --- series tables: exact rational structure ----------------------------------


def test_every_kind_constructible():
    for kind in FIXED_KINDS:
        exp = series_expansion(kind)
        assert exp.kind == kind
        assert len(exp.terms) >= 3
    for kind in ("g-small", "g-large", "delta-ab-small", "delta-ab-large"):
        assert series_expansion(kind, a=HALF).a == HALF


def test_kind_validation():
    with pytest.raises(ValueError):
        series_expansion("g3-small")
    with pytest.raises(ValueError):
        series_expansion("g-small")
    with pytest.raises(ValueError):
        series_expansion("g1-small", a=HALF)
    with pytest.raises(ValueError):
        series_expansion("g-small", a=2)
    with pytest.raises(ValueError):
        series_expansion("delta-ab-small", a=-1)


def test_small_kind_signs():
    # the even-index family alternates, the odd-index family is positive
    g1 = [c for _, c in series_expansion("g1-small").terms]
    g2 = [c for _, c in series_expansion("g2-small").terms]
    assert [c < 0 for c in g1] == [True, False, True, False, True, False]
    assert all(c > 0 for c in g2)
    assert [abs(c) for c in g1] == [abs(c) for c in g2]


def test_large_kind_duality():
    # sign flips exactly on the s^{1/3}, s^{-1/3}, s^{-1} terms
    g1 = dict(series_expansion("g1-large").terms)
    g2 = dict(series_expansion("g2-large").terms)
    flipped = {Fraction(1, 3), Fraction(-1, 3), Fraction(-1)}
    for e, c in g1.items():
        assert g2[e] == (-c if e in flipped else c)


@pytest.mark.parametrize(
    "whole,param,a",
    [
        ("g1-small", "g-small", Fraction(-1, 2)),
        ("g2-small", "g-small", HALF),
        ("g1-large", "g-large", Fraction(-1, 2)),
        ("g2-large", "g-large", HALF),
    ],
)
def test_fixed_tables_are_scaled_parametric_tables(whole, param, a):
    fixed = dict(series_expansion(whole).terms)
    scaled = {e: 4 * c for e, c in series_expansion(param, a=a).terms if c != 0}
    assert fixed == scaled


def test_delta_small_assembles_from_parametric_pair():
    plus = dict(series_expansion("delta-ab-small", a=HALF).terms)
    minus = dict(series_expansion("delta-ab-small", a=-HALF).terms)
    total = {e: plus[e] + minus[e] for e in plus if plus[e] + minus[e] != 0}
    assert total == dict(series_expansion("delta-small").terms)
    assert total[Fraction(6)] == Fraction(-966656, 1403325)


def test_delta_large_assembles_from_parametric_pair():
    plus = series_expansion("delta-ab-large", a=HALF)
    minus = series_expansion("delta-ab-large", a=-HALF)
    combined = {}
    for e, c in list(plus.terms) + list(minus.terms):
        combined[e] = combined.get(e, Fraction(0)) + c
    kept = {e: c for e, c in combined.items() if c != 0}
    assert kept == dict(series_expansion("delta-large").terms)
    # odd powers of s^{1/3} cancel in the pair
    for e in (Fraction(1, 3), Fraction(-1, 3), Fraction(-1), Fraction(-5, 3)):
        assert combined[e] == 0
    log_sum = plus.log_coefficient + minus.log_coefficient
    assert log_sum == series_expansion("delta-large").log_coefficient == Fraction(-1, 36)


def test_series_eval_frozen_values():
    # exact rational sums of the tabulated terms, frozen at 40 digits
    with working_precision(CFG):
        got = series_eval("g1-small", "0.1", CFG)
        assert abs(got.value - mpf("-0.3081157844177221954999732777510555288333")) < mpf(10) ** -35
        assert got.in_regime
        got2 = series_eval("g1-small", "0.2", CFG)
        assert abs(got2.value - mpf("-0.4767948564673186895409117631339853562076")) < mpf(10) ** -35
        got3 = series_eval("delta-small", "0.1", CFG)
        assert abs(got3.value - mpf("-0.0134152920071971923823775675627527479379")) < mpf(10) ** -35


def test_series_eval_zero_is_zero():
    val = series_eval("g1-small", 0, CFG)
    assert val.value == 0
    assert val.truncation == 0
    assert val.in_regime


def test_dyson_reference_value():
    with working_precision(CFG):
        assert abs(dyson_reference(CFG) - mpf("-0.4385011660")) < mpf(10) ** -9


def test_dyson_reference_equals_barnes_sum():
    # two routes to the same constant: the zeta side against the
    # Barnes-anchored c(1/2) + c(-1/2) sum
    with working_precision(CFG):
        total = c_constant(HALF, CFG) + c_constant(-HALF, CFG)
        assert abs(total - dyson_reference(CFG)) < mpf(10) ** -58


def test_delta_large_constant_term():
    exp = series_expansion("delta-large")
    assert exp.has_constant
    with working_precision(CFG):
        assert exp.constant_value(CFG) == dyson_reference(CFG)
        with_c = exp.eval(10, CFG)
        without = exp.eval(10, CFG, include_constant=False)
        assert abs((with_c - without) - dyson_reference(CFG)) < mpf(10) ** -55


def test_delta_ab_large_constant_off_grid():
    exp = series_expansion("delta-ab-large", a=Fraction(1, 3))
    with working_precision(CFG):
        exp.eval(10, CFG, include_constant=False)
        with pytest.raises(UnsupportedArgumentError):
            exp.eval(10, CFG)


def test_regime_heuristic_flips():
    small = series_expansion("g1-small")
    assert small.in_regime("0.1", CFG)
    assert not small.in_regime(5, CFG)
    large = series_expansion("g1-large")
    assert large.in_regime(1000, CFG)
    assert not large.in_regime("0.5", CFG)


def test_domain_checks():
    with pytest.raises(ValueError):
        series_eval("g1-small", -1, CFG)
    with pytest.raises(ValueError):
        series_eval("g1-large", 0, CFG)
    with pytest.raises(ValueError):
        series_eval("delta-large", "-2", CFG)


def test_truncation_estimator_tracks_power():
    exp = series_expansion("g1-small")
    with working_precision(CFG):
        at1 = exp.truncation_estimator("0.1", CFG)
        at2 = exp.truncation_estimator("0.2", CFG)
        # next exponent is 7, so doubling s scales the estimate by 2^7
        assert abs(at2 / at1 - 128) < mpf("1e-20")


def test_series_kind_listing():
    assert set(FIXED_KINDS) <= set(SERIES_KINDS)
    assert "delta-ab-large" in SERIES_KINDS


# --- extended seed coefficients -----------------------------------------------


def test_small_recurrence_reproduces_tabulated_terms():
    for a in (HALF, -HALF, Fraction(3, 2), Fraction(1, 3)):
        got = g_small_coefficients(a, 8)
        for i, (e, c) in enumerate(series_expansion("g-small", a=a).terms):
            assert e == i + 1
            assert got[i] == c


def test_small_recurrence_rejects_integer_a():
    with pytest.raises(ValueError):
        g_small_coefficients(Fraction(2), 8)


def test_small_recurrence_parity():
    plus = g_small_coefficients(HALF, 20)
    minus = g_small_coefficients(-HALF, 20)
    for m, (cp, cm) in enumerate(zip(plus, minus), start=1):
        assert cm == (cp if m % 2 == 0 else -cp)


def test_large_recurrence_reproduces_tabulated_terms():
    for a in (HALF, -HALF, Fraction(3, 2)):
        d = g_large_coefficients(a, 10)
        got = {Fraction(2 - k, 3): dk for k, dk in enumerate(d[:8]) if dk != 0}
        expect = {e: c for e, c in series_expansion("g-large", a=a).terms if c != 0}
        for e, c in expect.items():
            assert got[e] == c
        assert d[2] == 0


def test_large_recurrence_next_term_closes_the_loop():
    # the s^{-5/3} coefficient of g follows from the tabulated log-ratio
    # terms through d/ds(s L') = -g/s, which maps an s^{-5/3} log term
    # with coefficient p to a g term with coefficient -(25/9) p; the
    # recurrence must reproduce that exactly
    for a in (HALF, -HALF, Fraction(3, 2)):
        p = a * (a * a - 1) * (a ** 4 - a * a - 15) / 21870
        assert g_large_coefficients(a, 8)[7] == -Fraction(25, 9) * p


def test_large_recurrence_leading_solution_is_exact_at_a_zero():
    # g = s^{2/3}/2 solves the evolution exactly when a = 0
    d = g_large_coefficients(Fraction(0), 12)
    assert d[0] == Fraction(1, 2)
    assert all(dk == 0 for dk in d[1:])


def test_log_ratio_coefficients_match_tabulated_terms():
    # lambda_m = -c_m/m^2 must land on the delta-ab-small table
    for a in (HALF, -HALF, Fraction(1, 3)):
        lam = log_ratio_small_coefficients(a, 8)
        for i, (e, c) in enumerate(series_expansion("delta-ab-small", a=a).terms):
            assert lam[i] == c


def test_large_coefficients_grow_factorially():
    # the descending expansion is asymptotic; consumers must truncate
    d = g_large_coefficients(HALF, 40)
    assert abs(d[40]) > abs(d[20]) > abs(d[10])


# --- scaled flow for g(s, a) ---------------------------------------------------


def test_flow_small_seed_tracks_series():
    traj = solve_piii_prime(HALF, "0.25", LO, tolerance="1e-7", seed_order=40,
                            sample_points=["0.25"])
    assert not traj.halted
    with working_precision(LO):
        ref = series_eval("g-small", "0.25", LO, a=HALF)
        got = traj.value_at(mpf("0.25"))
        # frozen from the order-56 exact-rational Taylor sum at s = 1/4
        assert abs(got - mpf("0.52215902024942062066529546906978918953")) < mpf(10) ** -18
        # the short tabulated series differs by its own truncation
        assert abs(got - ref.value) < ref.truncation


def test_flow_linear_start():
    # g(s) = s/(2a) + O(s^2), checked at s = 1e-6
    traj = solve_piii_prime(HALF, "1e-6", LO, tolerance="1e-7")
    assert not traj.halted
    with working_precision(LO):
        assert abs(traj.endpoint[1] - mpf("1e-6")) < mpf(10) ** -11


def test_flow_self_convergence():
    one = solve_piii_prime(HALF, "0.5", LO, tolerance="1e-7", seed_order=40)
    two = solve_piii_prime(HALF, "0.5", LO, tolerance="5e-8", seed_order=40)
    assert not one.halted and not two.halted
    with working_precision(LO):
        assert abs(one.endpoint[1] - two.endpoint[1]) < mpf(10) ** -25


def test_flow_halts_at_movable_pole():
    traj = solve_piii_prime(HALF, 2, LO, tolerance="1e-6", seed_order=40)
    assert traj.halted
    assert "guard" in traj.halt_reason
    with working_precision(LO):
        assert mpf("0.85") < traj.reached < mpf("0.92")
        assert traj.samples[-1][1] > mpf(10) ** 6


def test_flow_halts_at_movable_zero():
    # the negative-parameter branch runs into g = 0, where the 1/(4g)
    # term is singular
    traj = solve_piii_prime(-HALF, 2, LO, tolerance="1e-6", seed_order=40)
    assert traj.halted
    with working_precision(LO):
        assert mpf("0.85") < traj.reached < mpf("0.92")
        assert abs(traj.samples[-1][1]) < mpf(10) ** -10


def test_flow_large_seed_downward():
    traj = solve_piii_prime(HALF, 50, LO, seed=SEED_LARGE_SERIES, tolerance="1e-7")
    assert not traj.halted
    assert traj.s0 == 100
    with working_precision(LO):
        ref = series_eval("g-large", 50, LO, a=HALF)
        assert abs(traj.endpoint[1] - ref.value) < ref.truncation


def test_flow_explicit_seed():
    base = solve_piii_prime(HALF, "0.25", LO, tolerance="1e-7", seed_order=40)
    s0, g0, gp0 = base.endpoint
    cont = solve_piii_prime(HALF, "0.5", LO, seed=SEED_EXPLICIT, s0=s0,
                            y0=(g0, gp0), tolerance="1e-7")
    direct = solve_piii_prime(HALF, "0.5", LO, tolerance="1e-7", seed_order=40)
    with working_precision(LO):
        assert abs(cont.endpoint[1] - direct.endpoint[1]) < mpf(10) ** -20


def test_flow_argument_validation():
    with pytest.raises(ValueError):
        solve_piii_prime(HALF, 0, LO)
    with pytest.raises(ValueError):
        solve_piii_prime(HALF, 1, LO, seed="bootstrap")
    with pytest.raises(ValueError):
        solve_piii_prime(HALF, 1, LO, seed=SEED_EXPLICIT, s0="0.5")
    with pytest.raises(ValueError):
        solve_piii_prime(Fraction(3), 1, LO)


def test_flow_value_at_unknown_point():
    traj = solve_piii_prime(HALF, "0.25", LO, tolerance="1e-6", seed_order=40)
    with pytest.raises(ValueError):
        traj.value_at(mpf("0.123456"))


def test_flow_determinism():
    one = solve_piii_prime(HALF, "0.25", LO, tolerance="1e-6", seed_order=40)
    two = solve_piii_prime(HALF, "0.25", LO, tolerance="1e-6", seed_order=40)
    assert one.endpoint == two.endpoint


# --- finite-n evolution ---------------------------------------------------------


def test_pv_endpoint_matches_direct_tables():
    params = make_params(1, "0.1", LO)
    traj = continue_pv(2, params, "0.1", 1, LO, tolerance="1e-6")
    assert not traj.halted
    with working_precision(LO):
        assert traj.endpoint_gap < mpf(10) ** -20


def test_pv_residual_rows_pass():
    params = make_params(1, "0.1", LO)
    traj = continue_pv(2, params, "0.1", 1, LO, tolerance="1e-6")
    rows = pv_residual_rows(traj, LO, max_rows=9)
    assert 2 <= len(rows) <= 9
    assert all(r.identity == "pv-path" for r in rows)
    assert all(r.passed for r in rows)
    assert rows[0].t == traj.t0
    assert rows[-1].t == traj.t_end


def test_pv_trivial_span():
    params = make_params(1, "0.3", LO)
    traj = continue_pv(3, params, "0.3", "0.3", LO)
    assert len(traj.samples) == 1
    assert traj.endpoint_gap == 0
    assert not traj.halted


def test_pv_downward_span():
    params = make_params(1, "0.8", LO)
    traj = continue_pv(1, params, "0.8", "0.4", LO, tolerance="1e-6")
    assert not traj.halted
    with working_precision(LO):
        assert traj.endpoint_gap < mpf(10) ** -20


def test_pv_validation():
    params = make_params(1, "0.1", LO)
    with pytest.raises(ValueError):
        continue_pv(-1, params, "0.1", 1, LO)
    with pytest.raises(ValueError):
        continue_pv(2, params, 0, 1, LO)
    with pytest.raises(ValueError):
        continue_pv(2, params, "0.1", "-1", LO)


# --- double-scaling scans --------------------------------------------------------


def test_scan_raw_vanishes_at_s_zero():
    res = double_scaling_scan(0, (2, 4), 1, "g1", LO)
    with working_precision(LO):
        assert all(abs(v) < mpf(10) ** -25 for v in res.raw)


def test_scan_g1_mechanics():
    res = double_scaling_scan("0.1", (4, 8, 16), 1, "g1", LO)
    assert res.mode == "g1"
    assert res.errors == [None, None, None]
    assert res.model in ("1/n", "1/n^2")
    assert res.reference_kind == "g1-small"
    assert res.error_bar is not None
    with working_precision(LO):
        # frozen from the verified finite-n pipeline
        assert abs(res.raw[0] - mpf("0.61643279674753910674820260385237")) < mpf(10) ** -25
        assert abs(res.extrapolated - mpf("0.5988")) < mpf("5e-4")


def test_scan_delta_modes_share_a_limit():
    even = double_scaling_scan("0.1", (4, 8, 16), 1, "delta1", LO)
    odd = double_scaling_scan("0.1", (4, 8, 16), 1, "delta2", LO)
    assert even.reference_kind == odd.reference_kind == "delta-small"
    with working_precision(LO):
        assert abs(even.extrapolated - odd.extrapolated) < mpf("0.01")


def test_scan_sigma_mode_has_no_reference():
    res = double_scaling_scan("0.05", (4, 8), 1, "sigma-n4", LO)
    assert res.reference is None
    assert res.agreement_digits is None
    with pytest.raises(ValueError):
        double_scaling_scan("0.05", (4, 8), 1, "sigma-n4", LO,
                            reference_kind="g1-small")


def test_scan_reference_override():
    res = double_scaling_scan("0.1", (4, 8), 1, "delta1", LO,
                              reference_kind="delta-large")
    assert res.reference_kind == "delta-large"
    assert "reference-out-of-regime" in res.flags
    with pytest.raises(ValueError):
        double_scaling_scan("0.1", (4, 8), 1, "delta1", LO,
                            reference_kind="g2-small")


def test_scan_validation():
    with pytest.raises(ValueError):
        double_scaling_scan("0.1", (), 1, "g1", LO)
    with pytest.raises(ValueError):
        double_scaling_scan("0.1", (8, 4), 1, "g1", LO)
    with pytest.raises(ValueError):
        double_scaling_scan("0.1", (4, 96), 1, "g1", LO)
    with pytest.raises(ValueError):
        double_scaling_scan("0.1", (4, 8), 1, "sigma-n2", LO)
    with pytest.raises(ValueError):
        double_scaling_scan("-0.1", (4, 8), 1, "g1", LO)


def test_scan_determinism():
    one = double_scaling_scan("0.1", (4, 8), 1, "g2", LO)
    two = double_scaling_scan("0.1", (4, 8), 1, "g2", LO)
    assert one.raw == two.raw
    assert one.extrapolated == two.extrapolated


# --- the scaled second-order form ------------------------------------------------


def test_sigma_form_constant_sampler_is_trivial():
    rows = sigma_form_residual(lambda s: mpf(3), ["0.1", "0.5"], LO)
    assert all(r.trivial and r.passed for r in rows)
    assert all(r.identity == "sf" for r in rows)


def test_sigma_form_square_root_family_satisfies_it():
    # sigma = C sqrt(s) zeroes the form identically for every C
    for c in ("1", "-0.7"):
        rows = sigma_form_residual(lambda s, c=mpf(c): c * s ** mpf("0.5"),
                                   ["0.1", "0.4"], LO)
        assert all(r.passed and not r.trivial for r in rows)


def test_sigma_form_flags_non_solution():
    rows = sigma_form_residual(lambda s: s * s, ["0.5"], LO)
    assert not rows[0].passed
    with working_precision(LO):
        assert rows[0].residual > mpf("0.1")


# --- the constant-term experiment ---------------------------------------------


def test_dyson_exact_ingredients():
    exp = dyson_constant_experiment(1, "0.05", 4, (4, 8), LO, route="scan")
    assert exp.cancellation_ok
    with working_precision(LO):
        assert abs(exp.exact_constant_sum - exp.reference) < mpf(10) ** -28
    assert exp.scan is not None
    assert exp.scan.reference_kind == "delta-large"
    assert exp.constant_estimate is not None


def test_dyson_ode_route_halts_at_the_pole():
    exp = dyson_constant_experiment(1, "0.05", 4, (4, 8), LO, route="ode",
                                    tolerance="1e-6")
    assert exp.ode_halted
    assert exp.ode_constant is None
    assert "ode-route-halted" in exp.flags
    with working_precision(LO):
        assert exp.ode_reached < mpf("0.9")


def test_dyson_auto_falls_back_to_scan():
    exp = dyson_constant_experiment(1, "0.05", 4, (4, 8, 16), LO, route="auto",
                                    tolerance="1e-6")
    assert exp.ode_halted
    assert exp.scan_constant is not None
    assert exp.constant_estimate == exp.scan_constant


def test_dyson_validation():
    with pytest.raises(ValueError):
        dyson_constant_experiment(1, 4, "0.05", (4, 8), LO)
    with pytest.raises(ValueError):
        dyson_constant_experiment(1, "0.05", 4, (4, 8), LO, route="series")
