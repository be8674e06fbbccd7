import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx

from ocfield import (
    contention_optimum,
    delta_const,
    g_of_l,
    lambda_max,
    outage_interference_limited,
    q_poly,
    q_poly_scaled,
    throughput_grid_max,
    throughput_max,
)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def gamma_for_unit_area(alpha):
    # gamma making Delta * gamma^(2/alpha) = 1
    return delta_const(alpha) ** (-alpha / 2.0)


def bisect_cubic_root():
    # independent root of t^3 - t^2 - 2t - 2 (the three-antenna polynomial
    # with denominators cleared), plain bisection
    def f(t):
        return t**3 - t**2 - 2.0 * t - 2.0

    lo, hi = 1.5, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class TestQPoly:
    def test_single_antenna_is_one_minus_t(self):
        assert q_poly(1, 0.0) == 1.0
        assert q_poly(1, 1.0) == 0.0

    def test_two_antennas_golden_root(self):
        assert abs(q_poly(2, GOLDEN)) <= 1e-14

    def test_matches_direct_evaluation(self):
        # L = 4: 1 + t + t^2/2 + t^3/6 - t^4/6
        t = 1.7
        direct = 1.0 + t + t * t / 2.0 + t**3 / 6.0 - t**4 / 6.0
        assert q_poly(4, t) == approx(direct, rel=1e-14)

    def test_scaled_form_is_damped(self):
        for L in (1, 2, 7, 40):
            for t in (0.5 * L, 0.77 * L, float(L)):
                assert q_poly_scaled(L, t) == approx(math.exp(-t) * q_poly(L, t), rel=1e-9, abs=1e-280)

    def test_domain(self):
        with pytest.raises(ValueError):
            q_poly(0, 1.0)
        with pytest.raises(ValueError):
            q_poly(2, -0.5)


class TestGofL:
    def test_one_antenna_exact(self):
        assert g_of_l(1) == 1.0

    def test_two_antennas_golden(self):
        assert g_of_l(2) == approx(GOLDEN, abs=1e-12)

    def test_three_antennas_vs_bisection_oracle(self):
        assert g_of_l(3) == approx(bisect_cubic_root(), abs=1e-10)

    def test_bracket_and_residual_through_200(self):
        previous = 0.0
        for L in range(1, 201):
            assert q_poly_scaled(L, 0.5 * L) > 0.0
            assert q_poly_scaled(L, float(L)) <= 0.0
            g = g_of_l(L)
            assert 0.5 * L <= g <= L
            assert abs(q_poly_scaled(L, g)) <= 1e-10
            assert g > previous
            previous = g


class TestOptimum:
    def test_lambda_max_unit_area_single_antenna(self):
        assert lambda_max(1, 4.0, gamma_for_unit_area(4.0)) == approx(1.0, rel=1e-12)

    def test_lambda_max_unit_area_two_antennas(self):
        assert lambda_max(2, 4.0, gamma_for_unit_area(4.0)) == approx(GOLDEN, rel=1e-12)

    def test_lambda_max_ratio_is_g(self):
        gamma = 42.0
        base = lambda_max(1, 3.5, gamma)
        for L in (2, 3, 8, 16):
            assert lambda_max(L, 3.5, gamma) / base == approx(g_of_l(L), rel=1e-12)

    def test_throughput_max_single_antenna(self):
        assert throughput_max(1, 4.0, gamma_for_unit_area(4.0)) == approx(
            math.exp(-1.0), rel=1e-12
        )

    def test_throughput_max_two_antennas(self):
        expected = GOLDEN**3 * math.exp(-GOLDEN)
        assert throughput_max(2, 4.0, gamma_for_unit_area(4.0)) == approx(expected, rel=1e-12)

    @pytest.mark.parametrize("L", [1, 2, 3, 5, 8, 20])
    def test_consistent_with_outage_curve(self, L):
        alpha, gamma = 3.5, 977.0
        lam = lambda_max(L, alpha, gamma)
        achieved = lam * (1.0 - outage_interference_limited(L, lam, alpha, gamma))
        assert throughput_max(L, alpha, gamma) == approx(achieved, rel=1e-12)

    @pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
    def test_grid_confirms_optimality(self, L):
        alpha, gamma = 4.0, gamma_for_unit_area(4.0)
        lam_star = lambda_max(L, alpha, gamma)
        t_star = throughput_max(L, alpha, gamma)
        for k in range(1000):
            lam = lam_star * (0.01 + (3.0 - 0.01) * k / 999.0)
            t = lam * (1.0 - outage_interference_limited(L, lam, alpha, gamma))
            assert t <= t_star + 1e-12

    def test_zero_gamma_rejected(self):
        with pytest.raises(ValueError):
            lambda_max(1, 4.0, 0.0)
        with pytest.raises(ValueError):
            throughput_max(1, 4.0, 0.0)

    def test_bundle_matches_parts(self):
        opt = contention_optimum(3, 3.5, 977.0)
        assert opt.L == 3
        assert opt.g == g_of_l(3)
        assert opt.lambda_max == approx(lambda_max(3, 3.5, 977.0), rel=1e-15)
        assert opt.t_max == approx(throughput_max(3, 3.5, 977.0), rel=1e-15)


class TestGridSearchExtension:
    def test_recovers_closed_form_when_noise_vanishes(self):
        alpha, gamma = 3.5, 100.0
        lam, t = throughput_grid_max(2, alpha, gamma, sigma2=1e-300)
        assert lam == approx(lambda_max(2, alpha, gamma), rel=1e-6)
        assert t == approx(throughput_max(2, alpha, gamma), rel=1e-9)

    def test_noise_lowers_the_peak(self):
        alpha, gamma = 3.5, 6309.573444801933
        _, t_clean = throughput_grid_max(3, alpha, gamma, sigma2=1e-300)
        lam_noisy, t_noisy = throughput_grid_max(3, alpha, gamma, sigma2=2e-6)
        assert t_noisy < t_clean
        assert lam_noisy > 0.0

    def test_result_is_a_grid_maximum(self):
        from ocfield.analytic import _poisson_cdf

        alpha, gamma, sigma2, L = 3.5, 6309.573444801933, 2e-6, 4
        area = delta_const(alpha) * gamma ** (2.0 / alpha)
        lam_star, t_star = throughput_grid_max(L, alpha, gamma, sigma2)
        for k in range(600):
            lam = lam_star * (0.05 + 4.0 * k / 599.0)
            t = lam * _poisson_cdf(lam * area + sigma2 * gamma, L)
            assert t <= t_star * (1.0 + 1e-9)


@given(st.integers(1, 150))
@settings(max_examples=60, deadline=None)
def test_root_properties_randomized(L):
    g = g_of_l(L)
    assert 0.5 * L <= g <= L
    assert abs(q_poly_scaled(L, g)) <= 1e-10
    assert g_of_l(L + 1) > g


@given(st.integers(1, 30), st.floats(0.0, 40.0))
@settings(max_examples=150)
def test_scaled_matches_plain_sign(L, t):
    plain = q_poly(L, t)
    scaled = q_poly_scaled(L, t)
    if abs(plain) > 1e-8 * math.exp(t):
        assert math.copysign(1.0, plain) == math.copysign(1.0, scaled)
