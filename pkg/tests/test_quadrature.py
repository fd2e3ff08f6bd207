import cmath
import math

import numpy as np
import pytest

from errors import NumericalError
from params import evolution_point
from quadrature import (
    assemble_quadrature,
    decay_exponent,
    expect_a,
    expect_a2,
    min_variance_approx,
    minimize_variance,
    phase_seed,
    quadrature_variance,
    quadrature_variance_approx,
)

FIG4_K = 3.3
FIG4_TAU = 0.01
PHIS = np.linspace(0.0, math.pi, 360, endpoint=False)


def _frozen(tau):
    ep = evolution_point(tau)
    ep.zeta = 0.0
    return ep


@pytest.mark.parametrize("phi", [0.0, 0.3, 1.0, 2.5])
def test_coherent_state_has_vacuum_noise(phi):
    result = quadrature_variance(phi, 3.0 + 4.0j, evolution_point(0.0), 2.0)
    assert result.variance == pytest.approx(1.0, abs=1e-12)
    assert result.photon_number == pytest.approx(25.0)


def test_moments_without_coupling():
    ep = evolution_point(0.9)
    alpha = cmath.rect(2.0, 0.7)
    assert expect_a(alpha, ep, 0.0) == pytest.approx(alpha, abs=1e-14)
    assert expect_a2(alpha, ep, 0.0) == pytest.approx(alpha * alpha, abs=1e-13)
    assert expect_a(0j, ep, 1.0) == 0j


def test_moments_bounded_by_amplitude():
    ep = evolution_point(0.7)
    for alpha_abs in (1.0, 30.0, 1e4):
        assert abs(expect_a(alpha_abs, ep, 0.5)) <= alpha_abs
        assert abs(expect_a2(alpha_abs, ep, 0.5)) <= alpha_abs ** 2


def test_variance_period_pi():
    ep = evolution_point(0.7)
    for phi in (0.1, 1.2, 2.9):
        a = quadrature_variance(phi, 2.0, ep, 0.5).variance
        b = quadrature_variance(phi + math.pi, 2.0, ep, 0.5).variance
        assert abs(a - b) < 1e-12


def test_assemble_rejects_negative_variance():
    with pytest.raises(NumericalError):
        assemble_quadrature(0.0, 0j, -1.0, 0.0)


def test_decay_exponent():
    assert decay_exponent(3.3, 0.01, 1e3) == pytest.approx(3.3 ** 2 * 1e-4 * (1.0 + 3.3 ** 2 * 1e6 * 1e-8 / 9.0), rel=1e-14)


def test_approximation_limits():
    ep = evolution_point(0.01)
    variance, qa = quadrature_variance_approx(0.4, 1e3, ep, 0.0)
    assert qa.big_gamma == 0.0
    assert variance == pytest.approx(1.0, abs=1e-12)
    assert min_variance_approx(1e3, 0.0) == 1.0
    assert min_variance_approx(10.0, 800.0) == pytest.approx(201.0)


def test_approximation_at_vartheta_root():
    ep = _frozen(FIG4_TAU)
    seed = phase_seed(1e3, ep, FIG4_K)
    variance, qa = quadrature_variance_approx(seed, 1e3, ep, FIG4_K)
    assert qa.vartheta == pytest.approx(0.0, abs=1e-12)
    assert variance == pytest.approx(min_variance_approx(1e3, qa.big_gamma), rel=1e-12)


def test_min_variance_approx_never_squeezes():
    rng = np.random.default_rng(7)
    for alpha_abs, big_gamma in zip(rng.uniform(0.0, 1e5, 1000), rng.uniform(0.0, 50.0, 1000)):
        assert min_variance_approx(alpha_abs, big_gamma) >= 1.0


@pytest.mark.parametrize("alpha_abs", [1e3, 3e3])
def test_approximation_tracks_exact_variance(alpha_abs):
    ep = _frozen(FIG4_TAU)
    for phi in PHIS:
        exact = quadrature_variance(phi, alpha_abs, ep, FIG4_K).variance
        approx, qa = quadrature_variance_approx(phi, alpha_abs, ep, FIG4_K)
        assert qa.in_regime
        assert abs(approx - exact) / exact < 0.01


def test_approximation_at_largest_amplitude():
    """
    The approximate phase shift k^2 |alpha|^2 tau^3 / 3 drops the next term, k^2 |alpha|^2 tau^5 / 60,
    which is about 2e-3 rad here. Where the variance is steep in phi that offset moves Delta X by a
    few percent, so the pointwise bound is 4%. The minimum does not depend on the offset and keeps 1%.
    """
    ep = _frozen(FIG4_TAU)
    for phi in PHIS:
        exact = quadrature_variance(phi, 1e4, ep, FIG4_K).uncertainty
        approx = math.sqrt(quadrature_variance_approx(phi, 1e4, ep, FIG4_K)[0])
        assert abs(approx - exact) / exact < 0.04
    _, best = minimize_variance(1e4, ep, FIG4_K)
    expected = min_variance_approx(1e4, decay_exponent(FIG4_K, FIG4_TAU, 1e4))
    assert abs(best.variance - expected) / expected < 0.01


def test_minimum_near_vartheta_root():
    ep = _frozen(FIG4_TAU)
    phi_min, best = minimize_variance(1e3, ep, FIG4_K)
    assert 0.0 <= phi_min < math.pi
    seed = math.fmod(phase_seed(1e3, ep, FIG4_K), math.pi)
    assert abs(math.remainder(phi_min - seed, math.pi)) < math.pi / 360
    assert all(best.variance <= quadrature_variance(phi, 1e3, ep, FIG4_K).variance + 1e-9 for phi in PHIS)


def test_no_squeezing_on_figure_grid():
    for tau in (0.05, 0.02, 0.01, 0.005):
        ep = _frozen(tau)
        for alpha_abs in np.logspace(1, 5, 17):
            _, best = minimize_variance(alpha_abs, ep, FIG4_K)
            assert best.uncertainty >= 1.0 - 1e-9
    ep = _frozen(FIG4_TAU)
    for alpha_abs in (1e3, 3e3, 1e4):
        assert min(quadrature_variance(phi, alpha_abs, ep, FIG4_K).uncertainty for phi in PHIS) >= 1.0 - 1e-9
