"""
Brute-force evolution of the field-mirror system in a truncated Fock basis.

Amplitudes are stored as a (field, mirror) matrix psi[n, m]. Two routes evolve it:
the factored closed-form operator and direct exponentiation of the Hamiltonian.
Both work in the lab frame; reduced_field_density removes the free field rotation
so results compare with the rotating-frame formulas of the phase module.
"""

import logging
import math
from functools import lru_cache
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.linalg import eigh
from scipy.special import gammaln

from errors import DomainError, PreconditionError, UnsupportedInputError
from params import DriveForce, DriveKind, EvolutionPoint, SystemParams, derive_dimensionless, evolution_point, gamma_n, phase_zeta
from phase import DEFAULT_GRID, PhaseDistribution, PhaseMethod, distribution_from_fourier
from quadrature import QuadratureResult, assemble_quadrature

logger = logging.getLogger(__name__)

MAX_PHASE_DIM = 200


class TruncatedState(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_cut_field: int = Field(..., ge=0, description="Largest field Fock index kept.")
    n_cut_mirror: int = Field(..., ge=0, description="Largest mirror Fock index kept.")
    amplitudes: np.ndarray = Field(..., description="psi[n, m] of shape (n_cut_field+1, n_cut_mirror+1).")
    truncation_loss: float = Field(0.0, ge=0, description="1 - norm^2 of the initial truncated state.")
    field_rotation: float = Field(0.0, description="Accumulated free field rotation r * tau in the lab frame.")

    @model_validator(mode="after")
    def _check_amplitudes(self) -> "TruncatedState":
        shape = (self.n_cut_field + 1, self.n_cut_mirror + 1)
        if self.amplitudes.shape != shape:
            raise ValueError(f"amplitudes have shape {self.amplitudes.shape}, expected {shape}")
        if not np.all(np.isfinite(self.amplitudes)):
            raise ValueError("amplitudes must be finite")
        return self

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_amplitudes(self, amplitudes: np.ndarray, field_rotation: float) -> "TruncatedState":
        return TruncatedState(n_cut_field=self.n_cut_field, n_cut_mirror=self.n_cut_mirror,
                              amplitudes=amplitudes, truncation_loss=self.truncation_loss,
                              field_rotation=field_rotation)


class FieldDensityMatrix(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int = Field(..., ge=1)
    entries: np.ndarray = Field(..., description="rho[n, n'] = <n|rho|n'>.")
    truncation_loss: float = Field(0.0, ge=0)

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def purity(self) -> float:
        return float(np.sum(np.abs(self.entries) ** 2))

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def photon_distribution(self) -> np.ndarray:
        return np.diagonal(self.entries).real.copy()


def coherent_amplitudes(z: complex, n_cut: int) -> np.ndarray:
    """Fock amplitudes of |z> for n = 0..n_cut, built in log form."""
    if n_cut < 0:
        raise DomainError(f"cutoff must be nonnegative, got {n_cut}")
    amplitudes = np.zeros(n_cut + 1, dtype=complex)
    if z == 0:
        amplitudes[0] = 1.0
        return amplitudes
    n = np.arange(n_cut + 1, dtype=float)
    log_mag = -0.5 * abs(z) ** 2 + n * math.log(abs(z)) - 0.5 * gammaln(n + 1.0)
    return np.exp(log_mag + 1j * n * np.angle(z))


def recommended_cutoff(amplitude_abs: float) -> int:
    return int(math.ceil(amplitude_abs ** 2 + 10.0 * amplitude_abs + 20.0))


def recommend_cutoffs(alpha: complex, beta: complex, ep: EvolutionPoint, k: float) -> Tuple[int, int]:
    """Field cutoff from the Poisson tail; mirror cutoff from the largest |gamma_n| it reaches."""
    n_field = recommended_cutoff(abs(alpha))
    largest = float(np.max(np.abs(gamma_n(np.arange(n_field + 1), ep, k, beta))))
    return n_field, recommended_cutoff(max(largest, abs(beta)))


def build_initial(alpha: complex, beta: complex, n_cut_field: int, n_cut_mirror: int) -> TruncatedState:
    for name, amplitude, cutoff in (("field", alpha, n_cut_field), ("mirror", beta, n_cut_mirror)):
        if cutoff < 0:
            raise DomainError(f"{name} cutoff must be nonnegative, got {cutoff}")
        if cutoff < recommended_cutoff(abs(amplitude)):
            logger.warning("%s cutoff %d is below the recommended %d", name, cutoff, recommended_cutoff(abs(amplitude)))
    field = coherent_amplitudes(alpha, n_cut_field)
    mirror = coherent_amplitudes(beta, n_cut_mirror)
    kept = math.fsum(np.abs(field) ** 2) * math.fsum(np.abs(mirror) ** 2)
    return TruncatedState(n_cut_field=n_cut_field, n_cut_mirror=n_cut_mirror,
                          amplitudes=np.outer(field, mirror), truncation_loss=max(0.0, 1.0 - kept))


def annihilation(n_cut: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_cut + 1, dtype=float)), k=1).astype(complex)


def evolve_closed_form(s: TruncatedState, tau: float, k: float, r: float, lam: float) -> TruncatedState:
    """
    Factored evolution, applied right to left: mirror rotation, field-conditioned
    displacement by (kn + lam) eta, Kerr phase exp(i mu (kn + lam)^2), field rotation.
    """
    ep = evolution_point(tau, lam)
    n = np.arange(s.n_cut_field + 1, dtype=float)
    m = np.arange(s.n_cut_mirror + 1, dtype=float)
    psi = s.amplitudes * np.exp(-1j * m * tau)[None, :]

    b = annihilation(s.n_cut_mirror)
    # exp(c (eta b^dag - eta^* b)) = exp(-i c H) with H = i (eta b^dag - eta^* b) Hermitian
    generator = 1j * (ep.eta * b.conj().T - ep.eta.conjugate() * b)
    w, v = eigh(generator)
    shift = k * n + lam
    mirror_basis = v.conj().T @ psi.T
    mirror_basis *= np.exp(-1j * np.outer(w, shift))
    psi = (v @ mirror_basis).T

    psi = psi * np.exp(1j * ep.mu * shift ** 2)[:, None]
    psi = psi * np.exp(-1j * r * n * tau)[:, None]
    return s.with_amplitudes(psi, s.field_rotation + r * tau)


@lru_cache(maxsize=8)
def _block_eigensystems(k: float, r: float, lam: float, n_cut_field: int, n_cut_mirror: int):
    """Eigensystems of H_n = r n + b^dag b - (k n + lam)(b + b^dag), one per field number n."""
    m = np.arange(n_cut_mirror + 1, dtype=float)
    position = np.diag(np.sqrt(m[1:]), k=1)
    position = position + position.T
    blocks = []
    for n in range(n_cut_field + 1):
        w, v = eigh(np.diag(r * n + m) - (k * n + lam) * position)
        w.setflags(write=False)
        v.setflags(write=False)
        blocks.append((w, v))
    return tuple(blocks)


def evolve_matrix_exp_scaled(s: TruncatedState, k: float, r: float, lam: float, tau: float) -> TruncatedState:
    """exp(-i H tau) with H = r a^dag a + b^dag b - k a^dag a (b + b^dag) - lam (b + b^dag)."""
    if tau < 0:
        raise DomainError(f"scaled time must be nonnegative, got {tau}")
    blocks = _block_eigensystems(k, r, lam, s.n_cut_field, s.n_cut_mirror)
    psi = np.empty_like(s.amplitudes)
    for n, (w, v) in enumerate(blocks):
        psi[n] = v @ (np.exp(-1j * w * tau) * (v.T @ s.amplitudes[n]))
    return s.with_amplitudes(psi, s.field_rotation + r * tau)


def evolve_matrix_exp(s: TruncatedState, p: SystemParams, drive: DriveForce, t: float) -> TruncatedState:
    if drive.kind is DriveKind.SAMPLED:
        raise UnsupportedInputError("the Hamiltonian route needs a constant or zero force")
    dp = derive_dimensionless(p)
    lam = drive.force_at(0.0) / p.force_scale / p.omega_m
    return evolve_matrix_exp_scaled(s, dp.k, dp.r, lam, p.omega_m * t)


def to_rotating_frame(s: TruncatedState) -> TruncatedState:
    n = np.arange(s.n_cut_field + 1, dtype=float)
    return s.with_amplitudes(s.amplitudes * np.exp(1j * s.field_rotation * n)[:, None], 0.0)


def reduced_field_density(s: TruncatedState, rotating_frame: bool = True) -> FieldDensityMatrix:
    psi = to_rotating_frame(s).amplitudes if rotating_frame else s.amplitudes
    rho = psi @ psi.conj().T
    return FieldDensityMatrix(dim=s.n_cut_field + 1, entries=rho, truncation_loss=s.truncation_loss)


def reduced_mirror_density(s: TruncatedState) -> np.ndarray:
    return s.amplitudes.T @ s.amplitudes.conj()


def coherent_projector(beta: complex, n_cut: int) -> np.ndarray:
    c = coherent_amplitudes(beta, n_cut)
    return np.outer(c, c.conj())


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho1 - rho2))))


def fidelity(s1: TruncatedState, s2: TruncatedState) -> float:
    """|<s1|s2>|^2, insensitive to global phase."""
    return float(abs(np.vdot(s1.amplitudes, s2.amplitudes)) ** 2)


def analytic_state(alpha: complex, beta: complex, ep: EvolutionPoint, k: float,
                   n_cut_field: int, n_cut_mirror: int) -> TruncatedState:
    """
    Rotating-frame entangled state sum_n c_n e^{i mu k^2 n^2} |n> |gamma_n>, with c_n the
    Fock amplitudes of alpha e^{i zeta}, up to a global phase.
    """
    zeta = phase_zeta(ep, k, beta)
    n = np.arange(n_cut_field + 1, dtype=float)
    field = coherent_amplitudes(alpha * np.exp(1j * zeta), n_cut_field) * np.exp(1j * ep.mu * k * k * n * n)
    mirror = np.array([coherent_amplitudes(g, n_cut_mirror) for g in gamma_n(n, ep, k, beta)])
    return TruncatedState(n_cut_field=n_cut_field, n_cut_mirror=n_cut_mirror,
                          amplitudes=field[:, None] * mirror)


def analytic_field_density(alpha: complex, beta: complex, ep: EvolutionPoint, k: float,
                           n_cut: int) -> FieldDensityMatrix:
    """rho[n, n'] = c_n c_n'^* e^{i mu k^2 (n^2 - n'^2)} <gamma_n'|gamma_n>."""
    zeta = phase_zeta(ep, k, beta)
    n = np.arange(n_cut + 1, dtype=float)
    field = coherent_amplitudes(alpha * np.exp(1j * zeta), n_cut) * np.exp(1j * ep.mu * k * k * n * n)
    g = gamma_n(n, ep, k, beta)
    g_abs2 = np.abs(g) ** 2
    overlap = np.exp(np.conj(g)[None, :] * g[:, None] - 0.5 * g_abs2[:, None] - 0.5 * g_abs2[None, :])
    return FieldDensityMatrix(dim=n_cut + 1, entries=np.outer(field, field.conj()) * overlap)


def oracle_phase_dist(rho: FieldDensityMatrix, method: PhaseMethod,
                      grid_size: int = DEFAULT_GRID) -> PhaseDistribution:
    """Phase density of rho: canonical <theta|rho|theta>/2pi or the radially integrated Q function."""
    if rho.dim > MAX_PHASE_DIM:
        raise PreconditionError(f"density matrix of dimension {rho.dim} exceeds {MAX_PHASE_DIM}")
    method = PhaseMethod(method)
    n = np.arange(rho.dim, dtype=float)
    if method is PhaseMethod.CANONICAL:
        weighted = rho.entries
    elif method is PhaseMethod.HETERODYNE:
        log_w = gammaln(0.5 * (n[:, None] + n[None, :]) + 1.0) - 0.5 * (gammaln(n + 1.0)[:, None] + gammaln(n + 1.0)[None, :])
        weighted = rho.entries * np.exp(log_w)
    else:
        raise ValueError(f"oracle phase distribution supports canonical or heterodyne, got {method.value}")
    c = np.array([np.trace(weighted, offset=q) for q in range(rho.dim)])
    return distribution_from_fourier(c, grid_size, PhaseMethod.ORACLE)


def oracle_quadrature(rho: FieldDensityMatrix, phi: float) -> QuadratureResult:
    if rho.dim < 3:
        raise PreconditionError("quadrature moments need at least three field levels")
    a = annihilation(rho.dim - 1)
    mean_a = complex(np.trace(rho.entries @ a))
    mean_a2 = complex(np.trace(rho.entries @ a @ a))
    photons = float(np.trace(rho.entries @ a.conj().T @ a).real)
    return assemble_quadrature(phi, mean_a, mean_a2, photons)
