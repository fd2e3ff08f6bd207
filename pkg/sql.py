"""
Standard-quantum-limit formulas for a mirror position/force sensor and the
sensitivity of the cavity phase scheme.
"""

import logging
import math

from pydantic import BaseModel, ConfigDict, Field

from errors import DomainError
from params import C_SI, DimensionlessParams, SystemParams, mu_of

logger = logging.getLogger(__name__)

LIGO_WAVELENGTH = 1.064e-6


class SensorLimits(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta_z_sql: float = Field(..., description="Position SQL sqrt(hbar / (2 m omega_m)) in m.")
    delta_p_sql: float = Field(..., description="Momentum SQL sqrt(hbar m omega_m / 2) in kg m/s.")
    n_opt: float = Field(..., description="Photon number balancing phase and radiation-pressure noise.")
    f_sql: float = Field(..., description="Force SQL over the measurement time, in N.")
    delta_z_opt: float = Field(..., description="Position resolution at n_opt, sqrt(2) times the SQL.")


class SchemeSensitivity(BaseModel):
    model_config = ConfigDict(frozen=True)

    bounces: float = Field(..., description="Effective number of light round trips tau c / (2 omega_m L).")
    delta_z_min: float = Field(..., description="Mirror displacement resolved by delta_theta, in m.")
    snr: float = Field(..., description="2 k lambda mu / delta_theta for a constant force.")
    snr_small_tau: float = Field(..., description="Small-tau reduction F tau^2 / (3 omega_m sqrt(2 hbar m omega_m)).")
    f_min: float = Field(..., description="sqrt(18 hbar m / (omega_m t^4)), the force resolved at delta_theta = k tau.")
    f_detectable: float = Field(..., description="Force giving snr = 1 at the given delta_theta.")
    q_m: float = Field(..., description="Validity scale 1 / (k tau).")


def ligo_preset() -> SystemParams:
    """Interferometer-scale mirror: 11 kg, 4 km arm, 1064 nm light, 1 Hz suspension."""
    omega_c = 2.0 * math.pi * C_SI / LIGO_WAVELENGTH
    return SystemParams(mass=11.0, cavity_length=4000.0, omega_c=omega_c, omega_m=2.0 * math.pi)


def sensor_limits(p: SystemParams, t: float) -> SensorLimits:
    if not t > 0:
        raise DomainError(f"measurement time must be positive, got {t}")
    delta_z = math.sqrt(p.hbar / (2.0 * p.mass * p.omega_m))
    delta_p = math.sqrt(p.hbar * p.mass * p.omega_m / 2.0)
    omega_0 = p.probe_frequency
    n_opt = p.mass * p.omega_m * p.c ** 2 / (8.0 * p.hbar * omega_0 ** 2)
    return SensorLimits(delta_z_sql=delta_z, delta_p_sql=delta_p, n_opt=n_opt, f_sql=delta_p / t,
                        delta_z_opt=math.sqrt(2.0) * delta_z)


def noise_components(p: SystemParams, n_bar: float):
    """(phase-fluctuation, radiation-pressure) position noise at mean photon number n_bar."""
    if not n_bar > 0:
        raise DomainError(f"mean photon number must be positive, got {n_bar}")
    omega_0 = p.probe_frequency
    root = math.sqrt(n_bar)
    dz_pf = p.c / (4.0 * omega_0 * root)
    dz_rp = 2.0 * p.hbar * omega_0 * root / (p.mass * p.c * p.omega_m)
    return dz_pf, dz_rp


def validity_scale(dp: DimensionlessParams, tau: float) -> float:
    if not tau > 0:
        raise DomainError(f"scaled time must be positive, got {tau}")
    return 1.0 / (dp.k * tau)


def scheme_sensitivity(p: SystemParams, dp: DimensionlessParams, tau: float, delta_theta: float,
                       force: float) -> SchemeSensitivity:
    if not tau > 0:
        raise DomainError(f"scaled time must be positive, got {tau}")
    if not delta_theta > 0:
        raise DomainError(f"phase resolution must be positive, got {delta_theta}")
    mu = mu_of(tau)
    lam = force / p.force_scale / p.omega_m
    snr = 2.0 * dp.k * lam * mu / delta_theta
    t = tau / p.omega_m
    return SchemeSensitivity(
        bounces=tau * p.c / (2.0 * p.omega_m * p.cavity_length),
        delta_z_min=p.omega_m * p.cavity_length / (p.omega_c * tau) * delta_theta,
        snr=snr,
        snr_small_tau=force * tau * tau / (3.0 * p.omega_m * p.force_scale),
        f_min=math.sqrt(18.0 * p.hbar * p.mass / (p.omega_m * t ** 4)),
        f_detectable=p.force_scale * p.omega_m * delta_theta / (2.0 * dp.k * mu),
        q_m=validity_scale(dp, tau),
    )


def qm_identity_check(p: SystemParams, dp: DimensionlessParams, t: float) -> float:
    """Relative residual of q_m^2 = (4 L / (c t))^2 n_opt, with the probe at omega_c."""
    tau = p.omega_m * t
    q_m = validity_scale(dp, tau)
    n_opt = p.mass * p.omega_m * p.c ** 2 / (8.0 * p.hbar * p.omega_c ** 2)
    rhs = (4.0 * p.cavity_length / (p.c * t)) ** 2 * n_opt
    return abs(q_m * q_m - rhs) / (q_m * q_m)
