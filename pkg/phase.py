"""
Canonical and heterodyne (Q-function) phase distributions of the cavity field.

Both distributions are Fourier series in theta whose coefficients are the A_q
(canonical) and B_q (heterodyne) families below, damped by exp(-mu_dot k^2 q^2).
The Gaussian helpers implement the small-tau, large-|alpha| approximation and its
Poisson-resummed comb.
"""

import cmath
import logging
import math
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional

import mpmath
import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.integrate import trapezoid
from scipy.special import gammaln

from errors import DomainError, NumericalError, PreconditionError, UnsupportedInputError
from params import EvolutionPoint, InitialState, gamma_n, phase_zeta
from specfun import (
    CANCELLATION_FLOOR,
    LogComplex,
    bessel_i_sum,
    bq_asymptotic_leading,
    extended_precision,
    kummer_phi,
    log_abs_total,
    logsum_arrays,
    mp_ratio_series,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
DEFAULT_GRID = 8192

# auto strategy: kummer up to KUMMER_LIMIT, asymptotic above ASYMPTOTIC_LIMIT, series between
KUMMER_LIMIT = 30.0
ASYMPTOTIC_LIMIT = 300.0

# Fourier terms stop where the Gaussian prefactor drops below exp(-PREFACTOR_LOG_FLOOR).
PREFACTOR_LOG_FLOOR = 32.0
CLAMP_FLOOR = -1e-12
# Relative accuracy assumed for each synthesized coefficient; negative density within
# this much of sum |c_q| / pi is rounding noise and is clamped.
COEFF_NOISE = 1e-8
# auto strategy leaves the asymptotic form once q^2 / (4 |xi_q|^2) exceeds this; the dropped
# next order, about its square, then stays near COEFF_NOISE.
ASYMPTOTIC_CORRECTION_MAX = 1e-4
VARIANCE_FLOOR = -1e-12
LOG_UNDERFLOW = -745.0

_auto_boundaries_checked = False


class CoeffStrategy(str, Enum):
    SERIES = "series"
    KUMMER = "kummer"
    BESSEL = "bessel"
    ASYMPTOTIC = "asymptotic"
    AUTO = "auto"


class PhaseMethod(str, Enum):
    CANONICAL = "canonical"
    HETERODYNE = "heterodyne"
    HETERODYNE_GENERAL_BETA = "heterodyne_general_beta"
    GAUSSIAN_COMB = "gaussian_comb"
    GAUSSIAN = "gaussian"
    ORACLE = "oracle"


class FourierCoeff(BaseModel):
    model_config = ConfigDict(frozen=True)

    q: int = Field(..., description="Fourier index.")
    xi_q: complex = Field(..., description="|alpha| * exp(-i mu k^2 q).")
    value: LogComplex = Field(..., description="Coefficient in log form.")

    def conjugate(self) -> "FourierCoeff":
        return FourierCoeff(q=-self.q, xi_q=self.xi_q.conjugate(), value=self.value.conjugate())

    def weighted(self, damping: float) -> complex:
        """Coefficient times exp(-damping * q^2) as a plain complex number."""
        if self.value.is_zero:
            return 0j
        log_mag = self.value.log_mag - damping * self.q * self.q
        if log_mag < LOG_UNDERFLOW:
            return 0j
        return cmath.rect(math.exp(log_mag), self.value.phase)


class PhaseMoments(BaseModel):
    model_config = ConfigDict(frozen=True)

    mean: float = Field(..., description="Mean phase on [-pi, pi).")
    second: float = Field(..., description="Mean of theta^2 on [-pi, pi).")
    uncertainty: float = Field(..., ge=0, description="sqrt(second - mean^2).")


class GaussianApprox(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma: float = Field(..., gt=0, description="Gaussian width k*tau*sqrt(1+eps1).")
    theta_tilde: float = Field(..., description="Unwrapped centre zeta + phi_alpha + eps2.")
    eps1: float = Field(..., description="Width correction.")
    eps2: float = Field(..., description="Centre shift k^2 tau^3 |alpha|^2 / 3.")
    in_regime: bool = Field(True, description="tau <= 0.1 and |alpha| >= 10 q_m.")

    @property
    def center(self) -> float:
        """theta_tilde wrapped into [-pi, pi)."""
        return wrap_phase(self.theta_tilde)


class PhaseDistribution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    theta_grid: np.ndarray = Field(..., description="Uniform grid on [-pi, pi).")
    density: np.ndarray = Field(..., description="Density values, clamped at zero.")
    method: PhaseMethod
    clamped: int = Field(0, ge=0, description="Number of tiny negative values set to zero.")
    imag_residue: float = Field(0.0, description="Max imaginary part of the synthesis over peak density.")

    @property
    def step(self) -> float:
        return TWO_PI / len(self.theta_grid)

    def integral(self) -> float:
        # periodic trapezoid on a uniform grid
        return float(math.fsum(self.density.tolist()) * self.step)

    def moments(self) -> PhaseMoments:
        """Moments by trapezoid quadrature on the grid, closed at theta = pi."""
        theta = np.append(self.theta_grid, math.pi)
        density = np.append(self.density, self.density[0])
        mean = float(trapezoid(theta * density, theta))
        second = float(trapezoid(theta * theta * density, theta))
        return _assemble_moments(mean, second)

    def sup_distance(self, other: "PhaseDistribution") -> float:
        if len(self.theta_grid) != len(other.theta_grid):
            raise PreconditionError("distributions live on different grids")
        return float(np.max(np.abs(self.density - other.density)))


def wrap_phase(theta: float) -> float:
    wrapped = math.remainder(theta, TWO_PI)
    return -math.pi if wrapped >= math.pi else wrapped


def theta_grid(grid_size: int) -> np.ndarray:
    if grid_size < 16:
        raise PreconditionError(f"phase grid needs at least 16 points, got {grid_size}")
    return -math.pi + TWO_PI * np.arange(grid_size) / grid_size


def xi(q: int, alpha_abs: float, mu: float, k: float) -> complex:
    return cmath.rect(alpha_abs, -mu * k * k * q)


def q_cutoff(mu_dot: float, k: float, alpha_abs: float) -> int:
    """Largest q kept: Gaussian damping or coefficient width, whichever cuts first."""
    by_width = int(math.ceil(16.0 * alpha_abs)) + 10
    damping = mu_dot * k * k
    if damping <= 0:
        return by_width
    by_damping = int(math.ceil(math.sqrt(PREFACTOR_LOG_FLOOR / damping))) + 10
    return min(by_damping, by_width)


def _window(alpha_abs: float) -> np.ndarray:
    """Fock indices carrying all but ~1e-14 of the Poisson(|alpha|^2) weight."""
    a2 = alpha_abs * alpha_abs
    lo = max(0, int(math.floor(a2 - 12.0 * alpha_abs - 50.0)))
    hi = int(math.ceil(a2 + 12.0 * alpha_abs + 50.0))
    return np.arange(lo, hi + 1, dtype=float)


def coeff_A(q: int, alpha_abs: float, mu: float, k: float) -> FourierCoeff:
    """Canonical coefficient e^{-|a|^2} xi^{|q|} sum_n xi^{2n} / sqrt(n! (n+|q|)!)."""
    if alpha_abs < 0:
        raise DomainError(f"alpha_abs must be nonnegative, got {alpha_abs}")
    x = -mu * k * k * q
    xi_q = cmath.rect(alpha_abs, x)
    aq = abs(q)
    if alpha_abs == 0:
        value = LogComplex.one() if q == 0 else LogComplex.zero()
        return FourierCoeff(q=q, xi_q=xi_q, value=value)
    a2 = alpha_abs * alpha_abs
    log_a = math.log(alpha_abs)
    n = _window(alpha_abs)
    log_mag = -a2 + (2.0 * n + aq) * log_a - 0.5 * (gammaln(n + 1.0) + gammaln(n + aq + 1.0))
    phase = (2.0 * n + aq) * x
    value, retained = logsum_arrays(log_mag, phase)
    if retained < CANCELLATION_FLOOR:
        def evaluate():
            xi_mp = mpmath.mpf(alpha_abs) * mpmath.expj(x)
            xi2 = xi_mp * xi_mp
            first = xi_mp ** aq / mpmath.sqrt(mpmath.factorial(aq))
            series = mp_ratio_series(first, lambda j: xi2 / mpmath.sqrt((j + 1) * (j + aq + 1)))
            return mpmath.exp(-mpmath.mpf(a2)) * series

        value = extended_precision(evaluate, log_abs_total(log_mag), retained, f"A_{q}")
    return FourierCoeff(q=q, xi_q=xi_q, value=value)


def _b_series(q: int, alpha_abs: float, x: float) -> LogComplex:
    aq = abs(q)
    a2 = alpha_abs * alpha_abs
    log_a = math.log(alpha_abs)
    n = _window(alpha_abs)
    log_mag = (-a2 + (2.0 * n + aq) * log_a + gammaln(n + 0.5 * aq + 1.0)
               - gammaln(n + aq + 1.0) - gammaln(n + 1.0))
    phase = (2.0 * n + aq) * x
    value, retained = logsum_arrays(log_mag, phase)
    if retained >= CANCELLATION_FLOOR:
        return value

    def evaluate():
        xi_mp = mpmath.mpf(alpha_abs) * mpmath.expj(x)
        xi2 = xi_mp * xi_mp
        first = xi_mp ** aq * mpmath.gamma(0.5 * aq + 1) / mpmath.factorial(aq)
        series = mp_ratio_series(
            first, lambda j: (j + 0.5 * aq + 1) / ((j + aq + 1) * (j + 1)) * xi2)
        return mpmath.exp(-mpmath.mpf(a2)) * series

    return extended_precision(evaluate, log_abs_total(log_mag), retained, f"B_{q} series")


def _b_kummer(q: int, alpha_abs: float, x: float) -> LogComplex:
    aq = abs(q)
    a2 = alpha_abs * alpha_abs
    prefactor = LogComplex(
        log_mag=-a2 + aq * math.log(alpha_abs) + gammaln(0.5 * aq + 1.0) - gammaln(aq + 1.0),
        phase=aq * x,
    )
    return prefactor * kummer_phi(0.5 * aq + 1.0, aq + 1.0, cmath.rect(a2, 2.0 * x))


def _b_bessel(q: int, alpha_abs: float, x: float) -> LogComplex:
    aq = abs(q)
    a2 = alpha_abs * alpha_abs
    prefactor = LogComplex(
        log_mag=math.log(math.sqrt(math.pi) / 2.0) - a2 + 0.5 * a2 * math.cos(2.0 * x) + math.log(alpha_abs),
        phase=0.5 * a2 * math.sin(2.0 * x) + x,
    )
    orders = (0.5 * (aq - 1), 0.5 * (aq + 1))
    return prefactor * bessel_i_sum(orders, cmath.rect(0.5 * a2, 2.0 * x), arg_z=2.0 * x)


def _check_auto_boundaries(mu: float, k: float) -> None:
    """Compare the auto routes at both switch points once per process."""
    global _auto_boundaries_checked
    if _auto_boundaries_checked:
        return
    _auto_boundaries_checked = True
    for alpha_abs, lower, upper, tolerance in (
        (KUMMER_LIMIT, _b_kummer, _b_series, 1e-8),
        (ASYMPTOTIC_LIMIT, _b_series, _b_asymptotic, 1e-3),
    ):
        for q in (1, 5):
            x = -mu * k * k * q
            if 2.0 * alpha_abs * alpha_abs * math.sin(x) ** 2 > 20.0:
                continue
            try:
                error = lower(q, alpha_abs, x).relative_error(upper(q, alpha_abs, x))
            except NumericalError as e:
                logger.warning("auto strategy boundary check at |alpha|=%g, q=%d failed: %s", alpha_abs, q, e)
                continue
            if error > tolerance:
                logger.warning(
                    "auto strategy routes disagree at |alpha|=%g, q=%d: relative error %.3g", alpha_abs, q, error)
            else:
                logger.debug("auto strategy boundary |alpha|=%g, q=%d: relative error %.3g", alpha_abs, q, error)


def _b_asymptotic(q: int, alpha_abs: float, x: float) -> LogComplex:
    return bq_asymptotic_leading(q, cmath.rect(alpha_abs, x), alpha_abs)


_B_ROUTES: Dict[CoeffStrategy, Callable[[int, float, float], LogComplex]] = {
    CoeffStrategy.SERIES: _b_series,
    CoeffStrategy.KUMMER: _b_kummer,
    CoeffStrategy.BESSEL: _b_bessel,
    CoeffStrategy.ASYMPTOTIC: _b_asymptotic,
}


def coeff_B(q: int, alpha_abs: float, mu: float, k: float,
            strategy: CoeffStrategy = CoeffStrategy.AUTO) -> FourierCoeff:
    """Heterodyne coefficient by the requested route."""
    if alpha_abs < 0:
        raise DomainError(f"alpha_abs must be nonnegative, got {alpha_abs}")
    strategy = CoeffStrategy(strategy)
    x = -mu * k * k * q
    xi_q = cmath.rect(alpha_abs, x)
    if q == 0:
        return FourierCoeff(q=0, xi_q=xi_q, value=LogComplex.one())
    if alpha_abs == 0:
        if strategy is CoeffStrategy.ASYMPTOTIC:
            bq_asymptotic_leading(q, xi_q, alpha_abs)
        return FourierCoeff(q=q, xi_q=xi_q, value=LogComplex.zero())
    if strategy is CoeffStrategy.AUTO:
        _check_auto_boundaries(mu, k)
        if alpha_abs <= KUMMER_LIMIT:
            strategy = CoeffStrategy.KUMMER
        elif alpha_abs > ASYMPTOTIC_LIMIT and q * q <= 4.0 * ASYMPTOTIC_CORRECTION_MAX * alpha_abs * alpha_abs:
            strategy = CoeffStrategy.ASYMPTOTIC
        else:
            strategy = CoeffStrategy.SERIES
    return FourierCoeff(q=q, xi_q=xi_q, value=_B_ROUTES[strategy](q, alpha_abs, x))


def distribution_from_fourier(coefficients, grid_size: int = DEFAULT_GRID,
                              method: PhaseMethod = PhaseMethod.ORACLE) -> PhaseDistribution:
    """
    Density (1/2pi) sum_q c_q e^{iq theta} from c_0..c_Q with c_{-q} = conj(c_q).
    """
    c = np.asarray(coefficients, dtype=complex)
    theta = theta_grid(grid_size)
    top = len(c) - 1
    if top < grid_size // 2:
        spectrum = np.zeros(grid_size, dtype=complex)
        q = np.arange(top + 1)
        signs = np.where(q % 2 == 0, 1.0, -1.0)
        spectrum[q] = c * signs
        spectrum[(-q[1:]) % grid_size] += np.conj(c[1:]) * signs[1:]
        values = np.fft.ifft(spectrum) * (grid_size / TWO_PI)
    else:
        values = np.full(grid_size, c[0] / TWO_PI, dtype=complex)
        for start in range(1, top + 1, 256):
            q = np.arange(start, min(start + 256, top + 1))
            waves = np.exp(1j * np.outer(theta, q))
            values += (waves @ c[q] + np.conj(waves) @ np.conj(c[q])) / TWO_PI
    density = values.real.copy()
    peak = float(np.max(np.abs(density))) or 1.0
    residue = float(np.max(np.abs(values.imag))) / peak
    if residue > 1e-12:
        logger.debug("%s synthesis imaginary residue %.3g", method.value, residue)
    low = float(np.min(density))
    floor = CLAMP_FLOOR - COEFF_NOISE * float(np.sum(np.abs(c))) / math.pi
    if low < floor:
        raise NumericalError("phase density is negative beyond truncation noise",
                             {"method": method.value, "min_density": low, "floor": floor})
    negative = density < 0
    clamped = int(np.count_nonzero(negative))
    if clamped:
        density[negative] = 0.0
        logger.warning("%s: clamped %d tiny negative density values", method.value, clamped)
    return PhaseDistribution(theta_grid=theta, density=density, method=method,
                             clamped=clamped, imag_residue=residue)


def _zeta(ep: EvolutionPoint, k: float) -> float:
    return ep.zeta if ep.zeta is not None else phase_zeta(ep, k, 0j)


def _coefficient_family(state: InitialState, ep: EvolutionPoint, k: float, canonical: bool,
                        strategy: CoeffStrategy) -> List[FourierCoeff]:
    q_cut = q_cutoff(ep.mu_dot, k, state.alpha_abs)
    logger.debug("q_cut=%d for |alpha|=%g", q_cut, state.alpha_abs)
    if canonical:
        return [coeff_A(q, state.alpha_abs, ep.mu, k) for q in range(1, q_cut + 1)]
    return [coeff_B(q, state.alpha_abs, ep.mu, k, strategy) for q in range(1, q_cut + 1)]


def _require_beta_zero(state: InitialState, route: str) -> None:
    if state.beta != 0:
        raise UnsupportedInputError(
            f"{route} needs beta = 0; use p_q_general_beta or the truncated-Fock oracle for beta != 0")


def _fourier_distribution(state: InitialState, ep: EvolutionPoint, k: float, grid_size: int,
                          canonical: bool, strategy: CoeffStrategy) -> PhaseDistribution:
    shift = _zeta(ep, k) + state.phi_alpha
    damping = ep.mu_dot * k * k
    coeffs = _coefficient_family(state, ep, k, canonical, strategy)
    c = np.empty(len(coeffs) + 1, dtype=complex)
    c[0] = 1.0
    for coef in coeffs:
        c[coef.q] = coef.weighted(damping) * cmath.exp(-1j * coef.q * shift)
    method = PhaseMethod.CANONICAL if canonical else PhaseMethod.HETERODYNE
    return distribution_from_fourier(c, grid_size, method)


def p_canonical(state: InitialState, ep: EvolutionPoint, k: float,
                grid_size: int = DEFAULT_GRID) -> PhaseDistribution:
    _require_beta_zero(state, "canonical Fourier route")
    return _fourier_distribution(state, ep, k, grid_size, True, CoeffStrategy.SERIES)


def p_q_dist(state: InitialState, ep: EvolutionPoint, k: float, grid_size: int = DEFAULT_GRID,
             strategy: CoeffStrategy = CoeffStrategy.AUTO) -> PhaseDistribution:
    _require_beta_zero(state, "heterodyne Fourier route")
    return _fourier_distribution(state, ep, k, grid_size, False, strategy)


def required_fock_cutoff(alpha_abs: float) -> int:
    return int(math.ceil(alpha_abs * alpha_abs + 12.0 * alpha_abs + 50.0))


def p_q_general_beta(state: InitialState, ep: EvolutionPoint, k: float, n_cut: int,
                     grid_size: int = DEFAULT_GRID) -> PhaseDistribution:
    """
    Heterodyne distribution for any mirror amplitude from the double sum over Fock
    indices, with Gamma((n+n'+2)/2) radial weights and the mirror overlaps <gamma_n'|gamma_n>.
    """
    a = state.alpha_abs
    needed = required_fock_cutoff(a)
    if n_cut < needed:
        raise PreconditionError(f"n_cut={n_cut} is below |alpha|^2 + 12|alpha| + 50 = {needed}")
    theta = theta_grid(grid_size)
    if a == 0:
        return PhaseDistribution(theta_grid=theta, density=np.full(grid_size, 1.0 / TWO_PI),
                                 method=PhaseMethod.HETERODYNE_GENERAL_BETA)
    zeta = phase_zeta(ep, k, state.beta)
    n = np.arange(n_cut + 1, dtype=float)
    g = gamma_n(n, ep, k, state.beta)
    g_abs2 = g.real * g.real + g.imag * g.imag
    single = n * math.log(a) - gammaln(n + 1.0)
    log_weight = (-a * a + single[:, None] + single[None, :]
                  + gammaln(0.5 * (n[:, None] + n[None, :]) + 1.0))
    overlap = np.conj(g)[None, :] * g[:, None] - 0.5 * g_abs2[:, None] - 0.5 * g_abs2[None, :]
    n2 = n * n
    phase = (ep.mu * k * k * (n2[:, None] - n2[None, :])
             + (zeta + state.phi_alpha) * (n[:, None] - n[None, :]))
    matrix = np.exp(log_weight + overlap.real + 1j * (phase + overlap.imag))
    c = np.array([np.trace(matrix, offset=q) for q in range(n_cut + 1)])
    dist = distribution_from_fourier(c, grid_size, PhaseMethod.HETERODYNE_GENERAL_BETA)
    return dist


def _assemble_moments(mean: float, second: float) -> PhaseMoments:
    variance = second - mean * mean
    if variance < VARIANCE_FLOOR:
        raise NumericalError("negative phase variance", {"mean": mean, "second": second})
    return PhaseMoments(mean=mean, second=second, uncertainty=math.sqrt(max(variance, 0.0)))


def _moments_from_weighted(weighted: Iterable[complex]) -> PhaseMoments:
    """Moments on [-pi, pi) from c_q * exp(-i pi q), q = 1, 2, ..."""
    mean_terms, second_terms = [], []
    for q, c in enumerate(weighted, start=1):
        mean_terms.append(2.0 * c.imag / q)
        second_terms.append(4.0 * c.real / (q * q))
    return _assemble_moments(math.fsum(mean_terms), math.pi ** 2 / 3.0 + math.fsum(second_terms))


def phase_moments_from_coeffs(coeffs: Iterable[FourierCoeff], mu_dot: float, k: float, zeta: float,
                              phi_alpha: float, q_cut: int) -> PhaseMoments:
    by_q = {c.q: c for c in coeffs}
    missing = [q for q in range(1, q_cut + 1) if q not in by_q]
    if missing:
        raise PreconditionError(f"coefficients missing for q = {missing[:5]} (q_cut={q_cut})")
    damping = mu_dot * k * k
    shift = zeta + phi_alpha + math.pi
    return _moments_from_weighted(
        by_q[q].weighted(damping) * cmath.exp(-1j * shift * q) for q in range(1, q_cut + 1))


def phase_moments(state: InitialState, ep: EvolutionPoint, k: float,
                  family: PhaseMethod = PhaseMethod.HETERODYNE,
                  strategy: CoeffStrategy = CoeffStrategy.AUTO) -> PhaseMoments:
    family = PhaseMethod(family)
    if family not in (PhaseMethod.CANONICAL, PhaseMethod.HETERODYNE):
        raise ValueError(f"moments from coefficients need canonical or heterodyne, got {family.value}")
    _require_beta_zero(state, f"{family.value} moments")
    coeffs = _coefficient_family(state, ep, k, family is PhaseMethod.CANONICAL, strategy)
    return phase_moments_from_coeffs(coeffs, ep.mu_dot, k, _zeta(ep, k), state.phi_alpha, len(coeffs))


def gaussian_approx(k: float, tau: float, alpha_abs: float, zeta: float = 0.0,
                    phi_alpha: float = 0.0) -> GaussianApprox:
    a2 = alpha_abs * alpha_abs
    eps1 = k * k * tau ** 4 * a2 / 9.0 - tau * tau / 12.0 + tau ** 4 / 360.0
    if 1.0 + eps1 <= 0:
        raise DomainError(f"Gaussian approximation breaks down: 1 + eps1 = {1.0 + eps1}")
    sigma = k * tau * math.sqrt(1.0 + eps1)
    if not sigma > 0:
        raise DomainError("Gaussian approximation needs k * tau > 0")
    eps2 = k * k * tau ** 3 * a2 / 3.0
    in_regime = tau <= 0.1 and alpha_abs * k * tau >= 10.0
    return GaussianApprox(sigma=sigma, theta_tilde=zeta + phi_alpha + eps2, eps1=eps1, eps2=eps2,
                          in_regime=in_regime)


def comb_cutoff(sigma: float) -> int:
    """Images beyond this index contribute below 1e-16 on [-pi, pi)."""
    return int(math.ceil(sigma * math.sqrt(74.0) / TWO_PI)) + 1


def p_gaussian_comb(theta, ga: GaussianApprox, m_cut: Optional[int] = None):
    if m_cut is None:
        m_cut = comb_cutoff(ga.sigma)
    m = np.arange(-m_cut, m_cut + 1)
    values = np.asarray(theta, dtype=float)
    offsets = values[..., None] - ga.center - TWO_PI * m
    density = np.exp(-offsets * offsets / (2.0 * ga.sigma ** 2)).sum(axis=-1) / math.sqrt(TWO_PI * ga.sigma ** 2)
    return float(density) if np.ndim(density) == 0 else density


def p_gaussian(theta, ga: GaussianApprox):
    return p_gaussian_comb(theta, ga, m_cut=0)


def gaussian_comb_distribution(ga: GaussianApprox, grid_size: int = DEFAULT_GRID) -> PhaseDistribution:
    theta = theta_grid(grid_size)
    return PhaseDistribution(theta_grid=theta, density=p_gaussian_comb(theta, ga),
                             method=PhaseMethod.GAUSSIAN_COMB)


def gaussian_distribution(ga: GaussianApprox, grid_size: int = DEFAULT_GRID) -> PhaseDistribution:
    theta = theta_grid(grid_size)
    return PhaseDistribution(theta_grid=theta, density=p_gaussian(theta, ga), method=PhaseMethod.GAUSSIAN)


def approx_series_moments(ga: GaussianApprox) -> PhaseMoments:
    """Moments of the Fourier series with Gaussian coefficients exp(-sigma^2 q^2 / 2)."""
    q_cut = int(math.ceil(math.sqrt(2.0 * PREFACTOR_LOG_FLOOR) / ga.sigma)) + 10
    shift = ga.theta_tilde + math.pi
    return _moments_from_weighted(
        math.exp(-0.5 * (ga.sigma * q) ** 2) * cmath.exp(-1j * shift * q) for q in range(1, q_cut + 1))
