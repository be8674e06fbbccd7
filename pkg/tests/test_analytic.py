import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx

from ocfield import (
    SystemParams,
    array_gain,
    delta_const,
    gamma_from_beta,
    outage_cdf,
    outage_interference_limited,
    outage_noise_limited,
    sir_mean,
    sir_variance,
    throughput_density,
)

from _oracles import delta_quadrature, sir_moment_quadrature


def lam_for_unit_exponent(alpha):
    # density making lam * Delta * gamma^(2/alpha) = 1 at gamma = 1
    return 1.0 / delta_const(alpha)


class TestDeltaConst:
    def test_alpha_4_closed_form(self):
        assert delta_const(4.0) == approx(math.pi**2 / 2.0, rel=1e-15)

    def test_alpha_3_5(self):
        assert delta_const(3.5) == approx(5.78481123887221, rel=1e-12)

    @pytest.mark.parametrize("alpha", [2.5, 3.0, 3.5, 4.0, 5.0])
    def test_matches_plane_integral(self, alpha):
        assert delta_const(alpha) == approx(delta_quadrature(alpha), abs=1e-8)

    @pytest.mark.parametrize("alpha", [2.0, 1.5, 0.0, -3.0])
    def test_diverging_domain_rejected(self, alpha):
        with pytest.raises(ValueError):
            delta_const(alpha)


class TestGammaFromBeta:
    def test_identity_case(self):
        assert gamma_from_beta(1.0, 1.0, 4.0) == 1.0

    def test_three_db_at_ten_meters(self):
        beta = 10.0**0.3
        assert gamma_from_beta(beta, 10.0, 3.5) == approx(6309.573444801933, rel=1e-12)

    def test_cubic(self):
        assert gamma_from_beta(2.0, 2.0, 3.0) == 16.0

    @pytest.mark.parametrize("beta,d_r,alpha", [(0.0, 1.0, 3.0), (1.0, 0.0, 3.0), (1.0, 1.0, 2.0)])
    def test_domain(self, beta, d_r, alpha):
        with pytest.raises(ValueError):
            gamma_from_beta(beta, d_r, alpha)


class TestOutageCdf:
    def test_vanishing_threshold(self):
        params = SystemParams(lam=1e-3, alpha=3.5, sigma2=1.0, d_r=10.0, L=2, beta=1e-280)
        assert outage_cdf(params) <= 1e-150

    def test_single_antenna_unit_exponent(self):
        params = SystemParams(lam=lam_for_unit_exponent(4.0), alpha=4.0, sigma2=0.0, d_r=1.0, L=1, beta=1.0)
        assert outage_cdf(params) == approx(1.0 - math.exp(-1.0), rel=1e-12)

    def test_two_antennas_unit_exponent(self):
        params = SystemParams(lam=lam_for_unit_exponent(4.0), alpha=4.0, sigma2=0.0, d_r=1.0, L=2, beta=1.0)
        assert outage_cdf(params) == approx(1.0 - 2.0 * math.exp(-1.0), rel=1e-12)

    def test_reduces_to_noise_limited_bitwise(self):
        for L in (1, 2, 5):
            params = SystemParams(lam=0.0, alpha=3.5, sigma2=0.37, d_r=3.0, L=L, beta=2.0)
            assert outage_cdf(params) == outage_noise_limited(L, 0.37, params.gamma)

    def test_reduces_to_interference_limited_bitwise(self):
        for L in (1, 3, 4):
            params = SystemParams(lam=2e-3, alpha=3.5, sigma2=0.0, d_r=10.0, L=L, beta=1.9)
            assert outage_cdf(params) == outage_interference_limited(L, 2e-3, 3.5, params.gamma)

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            SystemParams(lam=-1.0, alpha=3.5, sigma2=0.0, d_r=1.0, L=1, beta=1.0)
        with pytest.raises(ValueError):
            SystemParams(lam=0.0, alpha=3.5, sigma2=0.0, d_r=1.0, L=0, beta=1.0)
        with pytest.raises(ValueError):
            SystemParams(lam=0.0, alpha=2.0, sigma2=0.0, d_r=1.0, L=1, beta=1.0)


class TestSpecialCases:
    def test_noise_limited_zero_threshold(self):
        assert outage_noise_limited(1, 1.0, 0.0) == 0.0

    def test_noise_limited_half(self):
        assert outage_noise_limited(1, 1.0, math.log(2.0)) == approx(0.5, rel=1e-15)

    def test_noise_limited_three_antennas(self):
        expected = 1.0 - 2.5 * math.exp(-1.0)
        assert outage_noise_limited(3, 1.0, 1.0) == approx(expected, rel=1e-14)
        assert expected == approx(0.080301, abs=1e-6)

    def test_interference_limited_empty_field(self):
        assert outage_interference_limited(1, 0.0, 3.5, 123.0) == 0.0

    def test_interference_limited_two_antennas(self):
        lam = lam_for_unit_exponent(3.2)
        assert outage_interference_limited(2, lam, 3.2, 1.0) == approx(
            1.0 - 2.0 * math.exp(-1.0), rel=1e-12
        )

    def test_poisson_radius_identity(self):
        # outage equals the chance that a Poisson disk count reaches L
        scipy_stats = pytest.importorskip("scipy.stats")
        for L in (1, 2, 3, 5, 8):
            for lam in (1e-4, 1e-3, 5e-3):
                for gamma in (10.0, 6309.573444801933):
                    alpha = 3.5
                    r = math.sqrt(delta_const(alpha) / math.pi) * gamma ** (1.0 / alpha)
                    mean = lam * math.pi * r * r
                    expected = float(scipy_stats.poisson.sf(L - 1, mean))
                    assert outage_interference_limited(L, lam, alpha, gamma) == approx(
                        expected, abs=1e-14
                    )


class TestSirMoments:
    def test_mean_unit_case(self):
        assert sir_mean(1, 4.0, lam_for_unit_exponent(4.0), 1.0) == approx(2.0, rel=1e-12)

    def test_mean_distance_scaling(self):
        assert sir_mean(1, 4.0, lam_for_unit_exponent(4.0), 2.0) == approx(0.125, rel=1e-12)

    def test_mean_large_antenna_count(self):
        lam = lam_for_unit_exponent(4.0)
        ratio = sir_mean(50, 4.0, lam, 1.0) / (50.0**2 * (lam * delta_const(4.0)) ** -2.0)
        assert ratio == approx(1.0, rel=0.05)

    def test_variance_unit_case(self):
        assert sir_variance(1, 4.0, lam_for_unit_exponent(4.0), 1.0) == approx(20.0, rel=1e-12)

    def test_variance_distance_scaling(self):
        assert sir_variance(1, 4.0, lam_for_unit_exponent(4.0), 2.0) == approx(
            20.0 / 256.0, rel=1e-12
        )

    def test_zero_density_rejected(self):
        with pytest.raises(ValueError):
            sir_mean(1, 4.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            sir_variance(1, 4.0, 0.0, 1.0)

    @pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
    @pytest.mark.parametrize("alpha", [3.0, 3.5, 4.0])
    def test_moments_match_quadrature(self, L, alpha):
        lam, d_r = 0.8 / delta_const(alpha), 1.0
        mean, variance = sir_moment_quadrature(L, alpha, lam, d_r, delta_const(alpha))
        assert sir_mean(L, alpha, lam, d_r) == approx(mean, rel=1e-6)
        assert sir_variance(L, alpha, lam, d_r) == approx(variance, rel=1e-6)


class TestArrayGain:
    @pytest.mark.parametrize("L,expected", [(1, 2.0), (2, 6.0), (3, 12.0)])
    def test_small_antenna_counts(self, L, expected):
        assert array_gain(L, 4.0) == approx(expected, rel=1e-13)

    def test_normalized_gain_approaches_one(self):
        values = [array_gain(L, 4.0) / L**2 for L in (10, 20, 50)]
        assert values[0] > values[1] > values[2] > 1.0
        assert values[2] == approx(1.0, rel=0.05)


class TestThroughputDensity:
    def test_zero_density(self):
        params = SystemParams(lam=0.0, alpha=3.5, sigma2=1.0, d_r=1.0, L=2, beta=1.0)
        assert throughput_density(params) == 0.0

    def test_vanishing_threshold_recovers_density(self):
        params = SystemParams(lam=2e-3, alpha=3.5, sigma2=1e-5, d_r=10.0, L=2, beta=1e-250)
        assert throughput_density(params) == approx(2e-3, rel=1e-12)

    def test_unit_exponent_single_antenna(self):
        lam = lam_for_unit_exponent(4.0)
        params = SystemParams(lam=lam, alpha=4.0, sigma2=0.0, d_r=1.0, L=1, beta=1.0)
        assert throughput_density(params) == approx(lam * math.exp(-1.0), rel=1e-12)


system_params = st.builds(
    SystemParams,
    lam=st.floats(0.0, 0.05),
    alpha=st.floats(2.05, 8.0),
    sigma2=st.floats(0.0, 5.0),
    d_r=st.floats(0.1, 50.0),
    L=st.integers(1, 30),
    beta=st.floats(1e-6, 1e3),
)


@given(system_params)
def test_outage_within_unit_interval(params):
    assert 0.0 <= outage_cdf(params) <= 1.0


@given(system_params, st.floats(1.0001, 10.0))
@settings(max_examples=200)
def test_outage_monotone_in_scalars(params, factor):
    base = outage_cdf(params)
    for name in ("beta", "lam", "sigma2", "d_r"):
        scaled = replace(params, **{name: getattr(params, name) * factor})
        assert outage_cdf(scaled) >= base - 1e-12


@given(system_params)
def test_outage_decreasing_in_antennas(params):
    more = replace(params, L=params.L + 1)
    f_more, f_base = outage_cdf(more), outage_cdf(params)
    assert f_more <= f_base + 1e-15
    x = params.lam * delta_const(params.alpha) * params.gamma ** (2.0 / params.alpha)
    x += params.sigma2 * params.gamma
    if x > 1e-3 and 1e-12 < f_base < 1.0 - 1e-12:
        assert f_more < f_base


@given(system_params)
@settings(max_examples=100)
def test_special_case_identities_everywhere(params):
    no_noise = replace(params, sigma2=0.0)
    assert outage_cdf(no_noise) == outage_interference_limited(
        params.L, params.lam, params.alpha, no_noise.gamma
    )
    no_field = replace(params, lam=0.0)
    assert outage_cdf(no_field) == outage_noise_limited(params.L, params.sigma2, no_field.gamma)


@given(st.integers(1, 40), st.floats(2.05, 8.0), st.floats(1e-8, 0.05), st.floats(0.1, 50.0))
@settings(max_examples=100)
def test_sir_variance_positive(L, alpha, lam, d_r):
    assert sir_variance(L, alpha, lam, d_r) > 0.0
