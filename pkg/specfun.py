"""
Log-domain special functions for the phase-distribution coefficients.

Magnitudes such as exp(-|alpha|^2) with |alpha|^2 up to 1e6 never leave the log
domain. Every series reports how much of its absolute mass survives the complex
summation. When that fraction drops below CANCELLATION_FLOOR the value is
recomputed with mpmath at a precision chosen from the lost digits.
"""

import cmath
import logging
import math
from typing import Callable, Iterable, Optional, Sequence, Tuple

import mpmath
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator
from scipy.special import gammaln, loggamma, logsumexp

from errors import DomainError, NumericalError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
LN10 = math.log(10.0)

# Series stop after this many consecutive terms below TAIL_RATIO of the running maximum.
TAIL_RATIO = 1e-18
TAIL_RUN = 50
MAX_TERMS = 10_000_000
CHUNK = 1024

# Retained fraction |sum t| / sum |t| below which double precision is not trusted.
CANCELLATION_FLOOR = 1e-5
MAX_DIGITS = 20_000
MAX_EXTENDED_TERMS = 400_000

LOG_DOUBLE_MAX = 709.78


class LogComplex(BaseModel):
    """A complex number stored as (log|z|, arg z)."""
    model_config = ConfigDict(frozen=True)

    log_mag: float = Field(..., description="Natural log of the magnitude; -inf for zero.")
    phase: float = Field(0.0, description="Argument in (-pi, pi].")

    @field_validator("log_mag")
    @classmethod
    def _check_log_mag(cls, value: float) -> float:
        if math.isnan(value) or value == math.inf:
            raise ValueError(f"log magnitude must be finite or -inf, got {value}")
        return value

    @field_validator("phase")
    @classmethod
    def _normalize_phase(cls, value: float, info: ValidationInfo) -> float:
        if info.data.get("log_mag") == -math.inf:
            return 0.0
        if not math.isfinite(value):
            raise ValueError(f"phase must be finite, got {value}")
        reduced = math.remainder(value, TWO_PI)
        if reduced <= -math.pi:
            reduced += TWO_PI
        return reduced

    @classmethod
    def zero(cls) -> "LogComplex":
        return cls(log_mag=-math.inf, phase=0.0)

    @classmethod
    def one(cls) -> "LogComplex":
        return cls(log_mag=0.0, phase=0.0)

    @classmethod
    def from_complex(cls, z: complex) -> "LogComplex":
        if z == 0:
            return cls.zero()
        return cls(log_mag=math.log(abs(z)), phase=cmath.phase(z))

    @property
    def is_zero(self) -> bool:
        return self.log_mag == -math.inf

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        if self.log_mag > LOG_DOUBLE_MAX:
            raise NumericalError("value overflows double precision", {"log_mag": self.log_mag})
        return cmath.rect(math.exp(self.log_mag), self.phase)

    def scaled(self, log_factor: float, phase_shift: float = 0.0) -> "LogComplex":
        if self.is_zero:
            return self
        return LogComplex(log_mag=self.log_mag + log_factor, phase=self.phase + phase_shift)

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        if self.is_zero or other.is_zero:
            return LogComplex.zero()
        return LogComplex(log_mag=self.log_mag + other.log_mag, phase=self.phase + other.phase)

    def conjugate(self) -> "LogComplex":
        return LogComplex(log_mag=self.log_mag, phase=-self.phase)

    def relative_error(self, reference: "LogComplex") -> float:
        """|self - reference| / |reference|, evaluated without leaving the log domain."""
        if reference.is_zero:
            return 0.0 if self.is_zero else math.inf
        if self.is_zero:
            return 1.0
        ratio = cmath.rect(math.exp(min(self.log_mag - reference.log_mag, LOG_DOUBLE_MAX)),
                           self.phase - reference.phase)
        return abs(ratio - 1.0)


def log_gamma(x):
    """ln Gamma(x) for x > 0 (scalar or array)."""
    values = np.asarray(x, dtype=float)
    if not np.all(values > 0):
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    result = gammaln(values)
    return float(result) if np.ndim(result) == 0 else result


def logsum_arrays(log_mag, phase) -> Tuple[LogComplex, float]:
    """
    Sum of exp(log_mag + i*phase) over arrays.

    Returns the sum and the retained fraction |sum| / sum|terms| (1.0 for an empty sum).
    """
    log_mag = np.asarray(log_mag, dtype=float).ravel()
    phase = np.broadcast_to(np.asarray(phase, dtype=float), log_mag.shape).ravel()
    if log_mag.size == 0:
        return LogComplex.zero(), 1.0
    top = float(np.max(log_mag))
    if top == -math.inf:
        return LogComplex.zero(), 1.0
    if not math.isfinite(top):
        raise NumericalError("non-finite term in log-domain sum", {"max_log_mag": top})
    weights = np.exp(log_mag - top)
    re = math.fsum((weights * np.cos(phase)).tolist())
    im = math.fsum((weights * np.sin(phase)).tolist())
    total = math.fsum(weights.tolist())
    size = math.hypot(re, im)
    if size == 0.0:
        return LogComplex.zero(), 0.0
    return LogComplex(log_mag=top + math.log(size), phase=math.atan2(im, re)), size / total


def logsum_complex(terms: Iterable[LogComplex]) -> LogComplex:
    terms = list(terms)
    if not terms:
        return LogComplex.zero()
    value, _ = logsum_arrays([t.log_mag for t in terms], [t.phase for t in terms])
    return value


def log_abs_total(log_mag) -> float:
    """log of sum |terms|."""
    log_mag = np.asarray(log_mag, dtype=float)
    if log_mag.size == 0 or np.max(log_mag) == -math.inf:
        return -math.inf
    return float(logsumexp(log_mag))


def mp_to_log(value) -> LogComplex:
    if value == 0:
        return LogComplex.zero()
    logged = mpmath.log(value)
    return LogComplex(log_mag=float(mpmath.re(logged)), phase=float(mpmath.im(logged)))


def mp_ratio_series(first, ratio: Callable[[int], object]):
    """
    sum_n t_n with t_0 = first and t_{n+1} = t_n * ratio(n), in the current mpmath precision.
    Stops after TAIL_RUN consecutive terms below the working epsilon of the running maximum.
    """
    term = mpmath.mpc(first)
    total = term
    peak = abs(term)
    eps = mpmath.mpf(10) ** (-(mpmath.mp.dps + 5))
    quiet = 0
    for n in range(MAX_EXTENDED_TERMS):
        term = term * ratio(n)
        total += term
        size = abs(term)
        if size > peak:
            peak = size
        if size <= peak * eps:
            quiet += 1
            if quiet >= TAIL_RUN:
                return total
        else:
            quiet = 0
    raise NumericalError("extended-precision series did not converge",
                         {"terms": MAX_EXTENDED_TERMS, "dps": mpmath.mp.dps})


def extended_precision(evaluate: Callable[[], object], log_total: float, retained: float,
                       label: str) -> LogComplex:
    """
    Re-evaluate a cancelling sum with mpmath. The precision starts from the digits
    lost in double precision and is raised until at least 25 digits survive.
    """
    lost = -math.log10(retained) if retained > 0 else 2.0 * max(log_total, 0.0) / LN10 + 30.0
    dps = 40 + int(math.ceil(lost))
    for _ in range(8):
        if dps > MAX_DIGITS:
            break
        with mpmath.workdps(dps):
            value = evaluate()
            result = mp_to_log(value)
        survived = dps - (log_total - result.log_mag) / LN10 if not result.is_zero else 0.0
        if survived >= 25:
            logger.debug("%s: extended precision %d digits", label, dps)
            return result
        dps = max(2 * dps, int(math.ceil(dps - survived)) + 40)
    raise NumericalError(f"{label}: cancellation exceeds the extended-precision budget",
                         {"digits": dps, "log_abs_total": log_total})


def _converged_terms(log_term: Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]],
                     label: str) -> Tuple[np.ndarray, np.ndarray]:
    """Collect series terms chunk by chunk until the tail rule is met."""
    mags, phases = [], []
    running = -math.inf
    run = 0
    start = 0
    log_tail = math.log(TAIL_RATIO)
    while start < MAX_TERMS:
        n = np.arange(start, start + CHUNK, dtype=float)
        log_mag, phase = log_term(n)
        peaks = np.maximum.accumulate(np.maximum(log_mag, running))
        below = log_mag < peaks + log_tail
        for i, small in enumerate(below):
            run = run + 1 if small else 0
            if run >= TAIL_RUN:
                mags.append(log_mag[: i + 1])
                phases.append(phase[: i + 1])
                return np.concatenate(mags), np.concatenate(phases)
        mags.append(log_mag)
        phases.append(phase)
        running = float(peaks[-1])
        start += CHUNK
    raise NumericalError(f"{label} did not converge", {"terms": MAX_TERMS, "max_log_term": running})


def kummer_phi(a: float, b: float, z: complex) -> LogComplex:
    """Confluent hypergeometric Phi(a, b; z) = 1F1(a; b; z)."""
    if not a > 0:
        raise DomainError(f"kummer_phi needs a > 0, got {a}")
    if b <= 0 and float(b).is_integer():
        raise DomainError(f"kummer_phi needs b not a nonpositive integer, got {b}")
    z = complex(z)
    if z == 0:
        return LogComplex.one()
    log_abs_z = math.log(abs(z))
    arg_z = cmath.phase(z)
    base = loggamma(complex(b)) - loggamma(complex(a))

    def log_term(n):
        lg = loggamma(a + n + 0j) - loggamma(b + n + 0j) + base - gammaln(n + 1.0)
        return lg.real + n * log_abs_z, lg.imag + n * arg_z

    log_mag, phase = _converged_terms(log_term, "kummer_phi")
    value, retained = logsum_arrays(log_mag, phase)
    if retained >= CANCELLATION_FLOOR:
        return value
    return extended_precision(lambda: mpmath.hyp1f1(a, b, mpmath.mpc(z)),
                              log_abs_total(log_mag), retained, "kummer_phi")


def _check_order(nu: float) -> None:
    if nu < 0 or not float(2.0 * nu).is_integer():
        raise DomainError(f"bessel_i order must be a nonnegative half-integer, got {nu}")


def bessel_i_sum(orders: Sequence[float], z: complex, arg_z: Optional[float] = None) -> LogComplex:
    """
    sum over nu in orders of I_nu(z).

    arg_z replaces the principal argument of z inside (z/2)^nu, which selects the
    branch for half-integer orders.
    """
    for nu in orders:
        _check_order(nu)
    z = complex(z)
    if z == 0:
        return LogComplex.one() if any(nu == 0 for nu in orders) else LogComplex.zero()
    theta = cmath.phase(z) if arg_z is None else float(arg_z)
    log_half = math.log(abs(z) / 2.0)
    mags, phases = [], []
    for nu in orders:
        def log_term(m, nu=nu):
            power = 2.0 * m + nu
            return power * log_half - gammaln(m + 1.0) - gammaln(m + nu + 1.0), power * theta

        log_mag, phase = _converged_terms(log_term, "bessel_i")
        mags.append(log_mag)
        phases.append(phase)
    log_mag = np.concatenate(mags)
    phase = np.concatenate(phases)
    value, retained = logsum_arrays(log_mag, phase)
    if retained >= CANCELLATION_FLOOR:
        return value

    principal = cmath.phase(z)

    def evaluate():
        zz = mpmath.mpc(z)
        return mpmath.fsum(mpmath.besseli(nu, zz) * mpmath.expj(nu * (theta - principal))
                           for nu in orders)

    return extended_precision(evaluate, log_abs_total(log_mag), retained, "bessel_i")


def bessel_i(nu: float, z: complex, arg_z: Optional[float] = None) -> LogComplex:
    """Modified Bessel function I_nu(z) of half-integer order."""
    return bessel_i_sum((nu,), z, arg_z)


def bq_asymptotic_leading(q: int, xi_q: complex, alpha_abs: float) -> LogComplex:
    """exp(-|alpha|^2 + xi_q^2) * (1 - q^2 / (4 xi_q^2))."""
    if xi_q == 0:
        raise DomainError("asymptotic coefficient needs xi_q != 0")
    x = cmath.phase(xi_q)
    radius2 = abs(xi_q) ** 2
    s = math.sin(x)
    # Re(xi^2) - |alpha|^2 without cancelling the two large terms
    log_mag = (radius2 - alpha_abs * alpha_abs) - 2.0 * radius2 * s * s
    phase = radius2 * math.sin(2.0 * x)
    correction = 1.0 - q * q / (4.0 * xi_q * xi_q)
    if correction == 0:
        return LogComplex.zero()
    return LogComplex(log_mag=log_mag + math.log(abs(correction)), phase=phase + cmath.phase(correction))
