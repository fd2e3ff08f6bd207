"""
Homodyne quadrature X_phi = a e^{-i phi} + a^dag e^{i phi} of the cavity field,
exact (from <a> and <a^2>) and in the small-tau approximation.
"""

import cmath
import logging
import math
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import minimize_scalar

from errors import NumericalError
from params import EvolutionPoint, phase_zeta

logger = logging.getLogger(__name__)

NEGATIVE_VARIANCE_FLOOR = -1e-10


class QuadratureResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    phi: float = Field(..., description="Local-oscillator phase in rad.")
    mean_x: float = Field(..., description="<X_phi>.")
    variance: float = Field(..., ge=0, description="(Delta X_phi)^2; vacuum value 1.")
    mean_a: complex = Field(..., description="<a>.")
    mean_a2: complex = Field(..., description="<a^2>.")
    photon_number: float = Field(..., ge=0, description="<a^dag a>.")

    @property
    def uncertainty(self) -> float:
        return math.sqrt(self.variance)


class QuadApprox(BaseModel):
    model_config = ConfigDict(frozen=True)

    big_gamma: float = Field(..., ge=0, description="Decay exponent k^2 tau^2 (1 + k^2 |alpha|^2 tau^4 / 9).")
    vartheta: float = Field(..., description="zeta + phi_alpha + k^2 |alpha|^2 tau^3 / 3 - phi.")
    in_regime: bool = Field(True, description="|alpha| >= 10 and tau <= 0.1.")


def _zeta(ep: EvolutionPoint, k: float) -> float:
    return ep.zeta if ep.zeta is not None else phase_zeta(ep, k, 0j)


def _split(alpha: complex) -> Tuple[float, float]:
    return abs(alpha), (cmath.phase(alpha) if alpha != 0 else 0.0)


def expect_a(alpha: complex, ep: EvolutionPoint, k: float) -> complex:
    a, phi_a = _split(alpha)
    if a == 0:
        return 0j
    x = ep.mu * k * k
    s = math.sin(x)
    # -|a|^2 (1 - e^{2ix}) = -2|a|^2 sin^2 x + i |a|^2 sin 2x
    log_mag = -ep.mu_dot * k * k - 2.0 * a * a * s * s
    arg = _zeta(ep, k) + phi_a + x + a * a * math.sin(2.0 * x)
    return cmath.rect(a * math.exp(log_mag), arg)


def expect_a2(alpha: complex, ep: EvolutionPoint, k: float) -> complex:
    a, phi_a = _split(alpha)
    if a == 0:
        return 0j
    x = ep.mu * k * k
    s = math.sin(2.0 * x)
    log_mag = -4.0 * ep.mu_dot * k * k - 2.0 * a * a * s * s
    arg = 2.0 * (_zeta(ep, k) + phi_a + 2.0 * x) + a * a * math.sin(4.0 * x)
    return cmath.rect(a * a * math.exp(log_mag), arg)


def assemble_quadrature(phi: float, mean_a: complex, mean_a2: complex, photon_number: float) -> QuadratureResult:
    """Var X_phi = 1 + 2<a^dag a> + 2 Re(<a^2> e^{-2i phi}) - <X_phi>^2."""
    mean_x = 2.0 * (mean_a * cmath.exp(-1j * phi)).real
    variance = math.fsum([
        1.0,
        2.0 * photon_number,
        2.0 * (mean_a2 * cmath.exp(-2j * phi)).real,
        -mean_x * mean_x,
    ])
    if variance < NEGATIVE_VARIANCE_FLOOR:
        raise NumericalError("negative quadrature variance", {"phi": phi, "variance": variance})
    return QuadratureResult(phi=phi, mean_x=mean_x, variance=max(variance, 0.0), mean_a=mean_a,
                            mean_a2=mean_a2, photon_number=photon_number)


def quadrature_variance(phi: float, alpha: complex, ep: EvolutionPoint, k: float) -> QuadratureResult:
    return assemble_quadrature(phi, expect_a(alpha, ep, k), expect_a2(alpha, ep, k), abs(alpha) ** 2)


def decay_exponent(k: float, tau: float, alpha_abs: float) -> float:
    return k * k * tau * tau * (1.0 + k * k * alpha_abs * alpha_abs * tau ** 4 / 9.0)


def phase_seed(alpha: complex, ep: EvolutionPoint, k: float) -> float:
    """phi where vartheta vanishes: zeta + phi_alpha + k^2 |alpha|^2 tau^3 / 3."""
    a, phi_a = _split(alpha)
    return _zeta(ep, k) + phi_a + k * k * a * a * ep.tau ** 3 / 3.0


def quadrature_variance_approx(phi: float, alpha: complex, ep: EvolutionPoint, k: float) -> Tuple[float, QuadApprox]:
    a, _ = _split(alpha)
    big_gamma = decay_exponent(k, ep.tau, a)
    vartheta = phase_seed(alpha, ep, k) - phi
    decay = math.exp(-big_gamma)
    lost = -math.expm1(-big_gamma)
    s = math.sin(vartheta)
    # 1 + e^{-2G} cos 2v - 2 e^{-G} cos^2 v rewritten without cancellation
    variance = 1.0 + 2.0 * a * a * (lost * lost + 2.0 * s * s * decay * lost)
    qa = QuadApprox(big_gamma=big_gamma, vartheta=vartheta, in_regime=a >= 10.0 and ep.tau <= 0.1)
    return variance, qa


def min_variance_approx(alpha_abs: float, big_gamma: float) -> float:
    lost = math.expm1(-big_gamma)
    return 1.0 + 2.0 * alpha_abs * alpha_abs * lost * lost


def minimize_variance(alpha: complex, ep: EvolutionPoint, k: float, tol: float = 1e-10) -> Tuple[float, QuadratureResult]:
    """
    Minimum of the exact variance over phi, searched within pi/2 of the approximate
    minimum. Returns phi in [0, pi) and the result there.
    """
    seed = phase_seed(alpha, ep, k)
    found = minimize_scalar(
        lambda phi: quadrature_variance(phi, alpha, ep, k).variance,
        bounds=(seed - 0.5 * math.pi, seed + 0.5 * math.pi),
        method="bounded",
        options={"xatol": tol},
    )
    phi_min = math.fmod(found.x, math.pi)
    if phi_min < 0:
        phi_min += math.pi
    logger.debug("variance minimum at phi=%.6g (seed %.6g) after %d evaluations", phi_min, seed, found.nfev)
    return phi_min, quadrature_variance(phi_min, alpha, ep, k)
