"""
Physical and scaled parameters of the cavity/mirror model and the time-dependent
scalars (lambda, mu, mu_dot, eta, zeta) entering the closed-form evolution.
"""

import cmath
import logging
import math
from enum import Enum
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.integrate import trapezoid

from errors import DomainError

logger = logging.getLogger(__name__)

HBAR_SI = 1.054571817e-34
C_SI = 299792458.0

# Below this scaled time tau - sin(tau) is summed as its odd power series.
MU_SERIES_LIMIT = 1.0

IntOrArray = Union[int, np.ndarray]


class SystemParams(BaseModel):
    """Dimensional constants of the cavity and mirror."""
    model_config = ConfigDict(frozen=True)

    mass: float = Field(..., gt=0, description="Mirror mass in kg.")
    cavity_length: float = Field(..., gt=0, description="Free cavity length L in m.")
    omega_c: float = Field(..., gt=0, description="Cavity mode angular frequency in rad/s.")
    omega_m: float = Field(..., gt=0, description="Mirror oscillator angular frequency in rad/s.")
    omega_0: Optional[float] = Field(None, gt=0, description="Probe beam angular frequency in rad/s. Defaults to omega_c.")
    hbar: float = Field(HBAR_SI, gt=0, description="Reduced Planck constant in J*s.")
    c: float = Field(C_SI, gt=0, description="Speed of light in m/s.")
    mode_index: Optional[int] = Field(None, gt=0, description="Longitudinal mode number n with omega_c = pi*c*n/L, if known.")

    @model_validator(mode="after")
    def _check_mode_index(self) -> "SystemParams":
        if self.mode_index is not None:
            expected = math.pi * self.c * self.mode_index / self.cavity_length
            if abs(self.omega_c / expected - 1.0) > 1e-6:
                raise ValueError(
                    f"omega_c={self.omega_c} is inconsistent with mode_index={self.mode_index} "
                    f"(expected {expected})"
                )
        return self

    @property
    def probe_frequency(self) -> float:
        return self.omega_0 if self.omega_0 is not None else self.omega_c

    @property
    def force_scale(self) -> float:
        """sqrt(2 m omega_m hbar), dividing F(t) into f(t)."""
        return math.sqrt(2.0 * self.mass * self.omega_m * self.hbar)


class DimensionlessParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: float = Field(..., gt=0, description="Scaled coupling g/omega_m.")
    r: float = Field(..., gt=0, description="Frequency ratio omega_c/omega_m.")
    g: float = Field(..., gt=0, description="Optomechanical coupling in rad/s.")


class DriveKind(str, Enum):
    NONE = "none"
    CONSTANT = "constant"
    SAMPLED = "sampled"


class DriveForce(BaseModel):
    """Classical force F(t) acting on the mirror."""
    model_config = ConfigDict(frozen=True)

    kind: DriveKind = Field(DriveKind.NONE, description="none, constant or sampled.")
    force: float = Field(0.0, description="Constant force in N (kind=constant).")
    times: Tuple[float, ...] = Field((), description="Sample times in s (kind=sampled).")
    forces: Tuple[float, ...] = Field((), description="Force samples in N (kind=sampled).")

    @model_validator(mode="after")
    def _check_table(self) -> "DriveForce":
        if self.kind is DriveKind.SAMPLED:
            if len(self.times) < 2 or len(self.times) != len(self.forces):
                raise ValueError("sampled drive needs at least two (t, F) pairs of equal length")
            if self.times[0] != 0.0:
                raise ValueError("sampled drive must start at t=0")
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise ValueError("sampled drive times must be strictly increasing")
            if not all(math.isfinite(v) for v in self.forces):
                raise ValueError("sampled drive forces must be finite")
        elif not math.isfinite(self.force):
            raise ValueError("drive force must be finite")
        return self

    @classmethod
    def none(cls) -> "DriveForce":
        return cls(kind=DriveKind.NONE)

    @classmethod
    def constant(cls, force: float) -> "DriveForce":
        return cls(kind=DriveKind.CONSTANT, force=force)

    @classmethod
    def sampled(cls, times, forces) -> "DriveForce":
        return cls(kind=DriveKind.SAMPLED, times=tuple(float(t) for t in times),
                   forces=tuple(float(f) for f in forces))

    def force_at(self, t: float) -> float:
        if self.kind is DriveKind.NONE:
            return 0.0
        if self.kind is DriveKind.CONSTANT:
            return self.force
        return float(np.interp(t, self.times, self.forces))

    def impulse(self, t_end: float) -> float:
        """Integral of F from 0 to t_end (trapezoid on the user grid for sampled drives)."""
        if self.kind is DriveKind.NONE:
            return 0.0
        if self.kind is DriveKind.CONSTANT:
            return self.force * t_end
        if t_end > self.times[-1] * (1.0 + 1e-12):
            raise DomainError(
                f"sampled drive covers t <= {self.times[-1]} s, evolution asks for t = {t_end} s"
            )
        times = np.asarray(self.times)
        inside = times < t_end
        grid = np.append(times[inside], t_end)
        values = np.append(np.asarray(self.forces)[inside], self.force_at(t_end))
        return float(trapezoid(values, grid))


class EvolutionPoint(BaseModel):
    """All time-dependent scalars at scaled time tau. zeta is filled by phase_zeta."""

    tau: float = Field(..., ge=0, description="Scaled time omega_m * t.")
    lam: float = Field(0.0, description="Time-averaged scaled drive lambda(tau).")
    mu: float = Field(..., description="tau - sin(tau).")
    mu_dot: float = Field(..., ge=0, description="1 - cos(tau).")
    eta: complex = Field(..., description="1 - exp(-i tau).")
    zeta: Optional[float] = Field(None, description="Field phase shift; set by phase_zeta.")


class InitialState(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: complex = Field(0j, description="Field coherent amplitude.")
    beta: complex = Field(0j, description="Mirror coherent amplitude.")

    @field_validator("alpha", "beta")
    @classmethod
    def _finite(cls, value: complex) -> complex:
        if not (math.isfinite(value.real) and math.isfinite(value.imag)):
            raise ValueError("coherent amplitudes must be finite")
        return value

    @property
    def alpha_abs(self) -> float:
        return abs(self.alpha)

    @property
    def phi_alpha(self) -> float:
        return cmath.phase(self.alpha) if self.alpha != 0 else 0.0


def derive_dimensionless(p: SystemParams) -> DimensionlessParams:
    for name in ("mass", "cavity_length", "omega_c", "omega_m", "hbar", "c"):
        value = getattr(p, name)
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}")
    g = (p.omega_c / p.cavity_length) * math.sqrt(p.hbar / (2.0 * p.mass * p.omega_m))
    return DimensionlessParams(k=g / p.omega_m, r=p.omega_c / p.omega_m, g=g)


def mu_of(tau: float) -> float:
    if tau >= MU_SERIES_LIMIT:
        return tau - math.sin(tau)
    t2 = tau * tau
    term = tau * t2 / 6.0
    terms = []
    j = 2
    while term != 0.0 and abs(term) > 1e-18 * abs(terms[0] if terms else term):
        terms.append(term)
        term = -term * t2 / ((2 * j) * (2 * j + 1))
        j += 1
    return math.fsum(terms)


def evolution_point(tau: float, lam: float = 0.0) -> EvolutionPoint:
    """EvolutionPoint from the scaled drive lambda directly."""
    if not tau >= 0:
        raise DomainError(f"scaled time must be nonnegative, got {tau}")
    s = math.sin(0.5 * tau)
    c = math.cos(0.5 * tau)
    # 1 - cos(tau) = 2 sin^2(tau/2) and sin(tau) = 2 sin(tau/2) cos(tau/2) keep mu_dot = |eta|^2/2
    mu_dot = 2.0 * s * s
    eta = complex(mu_dot, 2.0 * s * c)
    return EvolutionPoint(tau=tau, lam=lam, mu=mu_of(tau), mu_dot=mu_dot, eta=eta)


def time_functions(tau: float, drive: DriveForce, p: SystemParams) -> EvolutionPoint:
    if not tau >= 0:
        raise DomainError(f"scaled time must be nonnegative, got {tau}")
    if drive.kind is DriveKind.NONE:
        lam = 0.0
    elif drive.kind is DriveKind.CONSTANT or tau == 0.0:
        lam = drive.force_at(0.0) / p.force_scale / p.omega_m
    else:
        logger.warning("sampled drive uses the time-averaged closed form, not validated against the oracle")
        lam = drive.impulse(tau / p.omega_m) / p.force_scale / tau
    return evolution_point(tau, lam)


def phase_zeta(ep: EvolutionPoint, k: float, beta: complex) -> float:
    zeta = 2.0 * k * ep.lam * ep.mu + k * (beta * ep.eta).imag
    ep.zeta = zeta
    return zeta


def gamma_n(n: IntOrArray, ep: EvolutionPoint, k: float, beta: complex):
    """Mirror coherent amplitude correlated with field Fock state n."""
    return beta * cmath.exp(-1j * ep.tau) + (k * n + ep.lam) * ep.eta


def _abs2(z):
    return z.real * z.real + z.imag * z.imag


def overlap_gamma(n: int, n2: int, ep: EvolutionPoint, k: float, beta: complex) -> complex:
    """<gamma_n2|gamma_n>."""
    if n < 0 or n2 < 0:
        raise DomainError(f"Fock indices must be nonnegative, got {n}, {n2}")
    if beta == 0:
        return complex(math.exp(-ep.mu_dot * k * k * (n - n2) ** 2))
    g1 = gamma_n(n, ep, k, beta)
    g2 = gamma_n(n2, ep, k, beta)
    return cmath.exp(g2.conjugate() * g1 - 0.5 * _abs2(g1) - 0.5 * _abs2(g2))
