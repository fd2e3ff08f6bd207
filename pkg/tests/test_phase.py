import cmath
import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from errors import NumericalError, PreconditionError, UnsupportedInputError
from params import InitialState, evolution_point
from phase import (
    CoeffStrategy,
    PhaseMethod,
    approx_series_moments,
    coeff_A,
    coeff_B,
    distribution_from_fourier,
    gaussian_approx,
    gaussian_comb_distribution,
    gaussian_distribution,
    p_canonical,
    p_gaussian,
    p_gaussian_comb,
    p_q_dist,
    p_q_general_beta,
    phase_moments,
    q_cutoff,
    required_fock_cutoff,
    theta_grid,
    wrap_phase,
    xi,
)
from specfun import mp_to_log

GRID = 4096


def test_zeroth_coefficients():
    assert coeff_B(0, 5.0, 0.1, 1.0).value.to_complex() == 1.0
    assert abs(coeff_A(0, 5.0, 0.1, 1.0).value.to_complex() - 1.0) < 1e-12
    assert coeff_B(3, 0.0, 0.1, 1.0).value.is_zero
    assert coeff_A(3, 0.0, 0.1, 1.0).value.is_zero


@pytest.mark.parametrize("alpha_abs", [1.0, 5.0, 30.0])
@pytest.mark.parametrize("mu_k2", [0.0, 0.03, 0.2])
def test_heterodyne_routes_agree(alpha_abs, mu_k2):
    for q in range(1, 21):
        series = coeff_B(q, alpha_abs, mu_k2, 1.0, CoeffStrategy.SERIES).value
        kummer = coeff_B(q, alpha_abs, mu_k2, 1.0, CoeffStrategy.KUMMER).value
        bessel = coeff_B(q, alpha_abs, mu_k2, 1.0, CoeffStrategy.BESSEL).value
        assert kummer.relative_error(series) < 1e-10, f"kummer q={q}"
        assert bessel.relative_error(series) < 1e-10, f"bessel q={q}"


def test_heterodyne_series_against_definition():
    alpha_abs, x, q = 5.0, -0.3, 3
    with mpmath.workdps(50):
        z = mpmath.mpf(alpha_abs) * mpmath.expj(x)
        total = mpmath.fsum(mpmath.gamma(n + q / 2.0 + 1) / (mpmath.factorial(n) * mpmath.factorial(n + q))
                            * z ** (2 * n + q) for n in range(400))
        reference = mp_to_log(mpmath.exp(-alpha_abs ** 2) * total)
    coefficient = coeff_B(q, alpha_abs, 0.1, 1.0, CoeffStrategy.SERIES)
    assert coefficient.value.relative_error(reference) < 1e-11
    assert coefficient.xi_q == pytest.approx(xi(q, alpha_abs, 0.1, 1.0))


def test_canonical_coefficient_against_definition():
    alpha_abs, x, q = 3.0, -0.2, 4
    with mpmath.workdps(50):
        z = mpmath.mpf(alpha_abs) * mpmath.expj(x)
        total = mpmath.fsum(z ** (2 * n + q) / mpmath.sqrt(mpmath.factorial(n) * mpmath.factorial(n + q))
                            for n in range(300))
        reference = mp_to_log(mpmath.exp(-alpha_abs ** 2) * total)
    assert coeff_A(q, alpha_abs, 0.0125, 2.0).value.relative_error(reference) < 1e-11


@pytest.mark.parametrize("alpha_abs, q, tolerance", [(400.0, 1, 1e-8), (500.0, 5, 1e-5), (500.0, 10, 1e-5)])
def test_asymptotic_route_at_large_amplitude(alpha_abs, q, tolerance):
    mu = evolution_point(0.01).mu
    series = coeff_B(q, alpha_abs, mu, 7.0, CoeffStrategy.SERIES).value
    asymptotic = coeff_B(q, alpha_abs, mu, 7.0, CoeffStrategy.ASYMPTOTIC).value
    assert asymptotic.relative_error(series) < tolerance


def test_auto_strategy_leaves_asymptotic_form_at_large_q():
    alpha_abs = 1000.0
    for q in (200, 2000, 16000):
        auto = coeff_B(q, alpha_abs, 0.0, 7.0).value
        assert auto.relative_error(coeff_B(q, alpha_abs, 0.0, 7.0, CoeffStrategy.SERIES).value) == 0.0
    # the leading asymptotic form misses by O(1) once q ~ 16 |alpha|
    asymptotic = coeff_B(16000, alpha_abs, 0.0, 7.0, CoeffStrategy.ASYMPTOTIC).value
    assert asymptotic.relative_error(coeff_B(16000, alpha_abs, 0.0, 7.0, CoeffStrategy.SERIES).value) > 0.5
    small = coeff_B(10, alpha_abs, 0.0, 7.0).value
    assert small.relative_error(coeff_B(10, alpha_abs, 0.0, 7.0, CoeffStrategy.ASYMPTOTIC).value) == 0.0


def test_auto_strategy_matches_series():
    for alpha_abs in (10.0, 100.0):
        auto = coeff_B(2, alpha_abs, 0.001, 1.0).value
        assert auto.relative_error(coeff_B(2, alpha_abs, 0.001, 1.0, CoeffStrategy.SERIES).value) < 1e-10


def test_q_cutoff():
    assert q_cutoff(0.0, 1.0, 2.0) == 42
    assert q_cutoff(1.0, 1.0, 100.0) == 16


def test_wrap_phase():
    assert wrap_phase(math.pi) == -math.pi
    assert wrap_phase(-math.pi) == -math.pi
    assert wrap_phase(1.5 * math.pi) == pytest.approx(-0.5 * math.pi)
    assert wrap_phase(0.25) == 0.25


def test_theta_grid():
    theta = theta_grid(16)
    assert theta[0] == -math.pi
    assert theta[-1] < math.pi
    with pytest.raises(PreconditionError):
        theta_grid(8)


def _explicit_density(c, theta):
    q = np.arange(1, len(c))
    waves = np.exp(1j * np.outer(theta, q))
    return (c[0].real + 2.0 * (waves @ c[1:]).real) / (2.0 * math.pi)


@pytest.mark.parametrize("top, grid_size", [(6, 64), (19, 32)])
def test_distribution_from_fourier_paths(top, grid_size):
    q = np.arange(top + 1)
    c = 0.3 ** q * np.exp(1j * q)
    dist = distribution_from_fourier(c, grid_size, PhaseMethod.ORACLE)
    np.testing.assert_allclose(dist.density, _explicit_density(c, dist.theta_grid), atol=1e-14)
    assert dist.clamped == 0
    assert dist.integral() == pytest.approx(1.0, abs=1e-13)


def test_distribution_rejects_negative_density():
    with pytest.raises(NumericalError):
        distribution_from_fourier([1.0, 0.9, 0.9], 64)


def test_uniform_distribution():
    dist = distribution_from_fourier([1.0], 4096)
    np.testing.assert_allclose(dist.density, 1.0 / (2.0 * math.pi))
    moments = dist.moments()
    assert moments.mean == pytest.approx(0.0, abs=1e-12)
    assert moments.uncertainty == pytest.approx(math.pi / math.sqrt(3.0), rel=1e-5)


def test_heterodyne_routes_agree_on_grid(small_state, small_point):
    fourier = p_q_dist(small_state, small_point, 0.5, GRID)
    general = p_q_general_beta(small_state, small_point, 0.5, required_fock_cutoff(2.0), GRID)
    assert fourier.method is PhaseMethod.HETERODYNE
    assert general.method is PhaseMethod.HETERODYNE_GENERAL_BETA
    assert fourier.sup_distance(general) < 1e-8
    assert fourier.integral() == pytest.approx(1.0, abs=1e-6)
    assert general.integral() == pytest.approx(1.0, abs=1e-6)
    assert p_canonical(small_state, small_point, 0.5, GRID).integral() == pytest.approx(1.0, abs=1e-6)


def test_fourier_routes_need_zero_mirror_amplitude(small_point):
    state = InitialState(alpha=2.0, beta=0.3j)
    with pytest.raises(UnsupportedInputError):
        p_q_dist(state, small_point, 0.5, GRID)
    with pytest.raises(UnsupportedInputError):
        p_canonical(state, small_point, 0.5, GRID)
    with pytest.raises(UnsupportedInputError):
        phase_moments(state, small_point, 0.5)


def test_general_beta_route(small_point):
    state = InitialState(alpha=1.5, beta=0.5 + 0.3j)
    with pytest.raises(PreconditionError):
        p_q_general_beta(state, small_point, 0.5, 20, GRID)
    dist = p_q_general_beta(state, small_point, 0.5, required_fock_cutoff(1.5), GRID)
    assert dist.integral() == pytest.approx(1.0, abs=1e-6)
    vacuum = p_q_general_beta(InitialState(beta=0.5), small_point, 0.5, 60, 64)
    np.testing.assert_allclose(vacuum.density, 1.0 / (2.0 * math.pi))


def test_moments_from_coefficients_match_grid(small_state, small_point):
    dist = p_q_dist(small_state, small_point, 0.5, 8192)
    from_grid = dist.moments()
    from_series = phase_moments(small_state, small_point, 0.5, PhaseMethod.HETERODYNE)
    assert from_series.mean == pytest.approx(from_grid.mean, abs=1e-4)
    assert from_series.uncertainty == pytest.approx(from_grid.uncertainty, abs=1e-4)


def test_heterodyne_wider_than_canonical_for_coherent_state():
    state = InitialState(alpha=3.0)
    ep = evolution_point(0.0)
    canonical = phase_moments(state, ep, 1.0, PhaseMethod.CANONICAL)
    heterodyne = phase_moments(state, ep, 1.0, PhaseMethod.HETERODYNE)
    assert canonical.mean == pytest.approx(0.0, abs=1e-12)
    assert heterodyne.uncertainty > canonical.uncertainty


def test_moments_follow_field_phase():
    ep = evolution_point(0.0)
    moments = phase_moments(InitialState(alpha=cmath.rect(5.0, 0.4)), ep, 1.0)
    assert moments.mean == pytest.approx(0.4, abs=1e-10)


def test_gaussian_approx():
    ga = gaussian_approx(7.0, 0.01, 1000.0)
    eps1 = 49.0 * 1e-8 * 1e6 / 9.0 - 1e-4 / 12.0 + 1e-8 / 360.0
    assert ga.sigma == pytest.approx(0.07 * math.sqrt(1.0 + eps1), rel=1e-14)
    assert ga.theta_tilde == pytest.approx(49.0 * 1e-6 * 1e6 / 3.0, rel=1e-14)
    assert ga.in_regime
    assert not gaussian_approx(7.0, 0.01, 10.0).in_regime
    with pytest.raises(ValueError):
        gaussian_approx(7.0, 0.0, 10.0)


def test_gaussian_comb_normalized_and_periodic():
    theta = theta_grid(8192)
    for sigma_tau in (0.05, 0.5):
        ga = gaussian_approx(6.0, sigma_tau, 1.0)
        density = p_gaussian_comb(theta, ga)
        assert math.fsum(density) * (2.0 * math.pi / 8192) == pytest.approx(1.0, abs=1e-10)
    narrow = gaussian_approx(6.0, 0.05, 1.0, zeta=0.3)
    shifted = gaussian_approx(6.0, 0.05, 1.0, zeta=0.3 + 2.0 * math.pi)
    np.testing.assert_allclose(p_gaussian_comb(theta, narrow), p_gaussian_comb(theta, shifted), atol=1e-12)
    assert p_gaussian(0.3 + narrow.eps2, narrow) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi * narrow.sigma ** 2))


def test_gaussian_distributions_and_series_moments():
    ga = gaussian_approx(3.0, 0.1, 1.0, zeta=0.5)
    comb = gaussian_comb_distribution(ga, 8192)
    assert comb.method is PhaseMethod.GAUSSIAN_COMB
    assert gaussian_distribution(ga, 8192).method is PhaseMethod.GAUSSIAN
    series = approx_series_moments(ga)
    grid = comb.moments()
    assert series.mean == pytest.approx(grid.mean, abs=1e-7)
    assert series.uncertainty == pytest.approx(grid.uncertainty, abs=1e-7)
    assert series.uncertainty == pytest.approx(ga.sigma, rel=1e-6)


def test_series_moments_against_quadrature_near_the_cut():
    ga = gaussian_approx(3.0, 0.1, 1.0, zeta=3.0)
    mean, _ = quad(lambda t: t * p_gaussian_comb(t, ga), -math.pi, math.pi, points=[ga.center], limit=200,
                   epsabs=1e-13)
    second, _ = quad(lambda t: t * t * p_gaussian_comb(t, ga), -math.pi, math.pi, points=[ga.center], limit=200,
                     epsabs=1e-13)
    series = approx_series_moments(ga)
    assert series.mean == pytest.approx(mean, abs=1e-9)
    assert series.second == pytest.approx(second, abs=1e-9)
    assert series.uncertainty > ga.sigma


@pytest.fixture(scope="module")
def narrow_pair():
    """Canonical and heterodyne densities at k = 7, tau = 0.01, |alpha| = 500."""
    state, ep = InitialState(alpha=500.0), evolution_point(0.01)
    return p_canonical(state, ep, 7.0), p_q_dist(state, ep, 7.0)


def test_narrow_distributions_at_large_amplitude(narrow_pair):
    canonical, heterodyne = narrow_pair
    assert canonical.integral() == pytest.approx(1.0, abs=1e-8)
    assert heterodyne.integral() == pytest.approx(1.0, abs=1e-8)
    assert canonical.moments().uncertainty < heterodyne.moments().uncertainty
    sigma = gaussian_approx(7.0, 0.01, 500.0).sigma
    assert heterodyne.moments().uncertainty == pytest.approx(sigma, rel=0.01)


def test_gaussian_prefactor_matches_heterodyne_fourier_transform(narrow_pair):
    _, heterodyne = narrow_pair
    ga = gaussian_approx(7.0, 0.01, 500.0)
    assert ga.in_regime
    for q in (1, 2, 3):
        weights = np.exp(-1j * q * (heterodyne.theta_grid - ga.theta_tilde))
        transform = complex(np.sum(heterodyne.density * weights)) * heterodyne.step
        expected = math.exp(-0.5 * (ga.sigma * q) ** 2)
        assert abs(transform / expected - 1.0) < 1e-3


def test_gaussian_comb_matches_heterodyne_pointwise():
    state, ep = InitialState(alpha=1000.0), evolution_point(0.01)
    exact = p_q_dist(state, ep, 7.0)
    comb = gaussian_comb_distribution(gaussian_approx(7.0, 0.01, 1000.0), len(exact.theta_grid))
    peak = float(np.max(exact.density))
    assert comb.sup_distance(exact) < 5e-3 * peak
    assert abs(wrap_phase(exact.moments().mean - comb.moments().mean)) < 1e-3


@pytest.mark.slow
def test_coherent_state_at_zero_time_and_large_amplitude():
    state, ep = InitialState(alpha=1000.0), evolution_point(0.0)
    grid = 32768
    heterodyne = p_q_dist(state, ep, 7.0, grid)
    canonical = p_canonical(state, ep, 7.0, grid)
    assert heterodyne.integral() == pytest.approx(1.0, abs=1e-8)
    assert canonical.integral() == pytest.approx(1.0, abs=1e-8)
    assert heterodyne.moments().uncertainty == pytest.approx(1.0 / (math.sqrt(2.0) * 1000.0), rel=0.01)
    assert canonical.moments().uncertainty == pytest.approx(1.0 / 2000.0, rel=0.01)


def test_negative_floor_scales_with_coefficient_mass():
    # a narrow peak with relative coefficient noise of 1e-9 still synthesizes
    q = np.arange(400)
    rng = np.random.default_rng(7)
    c = np.exp(-0.5 * (0.02 * q) ** 2) * (1.0 + 1e-9 * rng.standard_normal(400))
    c[0] = 1.0
    dist = distribution_from_fourier(c, 4096)
    assert dist.integral() == pytest.approx(1.0, abs=1e-12)
    inverted = -c
    inverted[0] = 1.0
    with pytest.raises(NumericalError):
        distribution_from_fourier(inverted, 4096)
