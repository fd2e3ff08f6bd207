"""
Run configuration: environment defaults, key=value config files and the validated
RunConfig model every command is built from.
"""

import logging
import math
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from errors import ConfigError, ReportError
from phase import DEFAULT_GRID, CoeffStrategy
from reporting import OutputFormat

logger = logging.getLogger(__name__)

MAX_SWEEP_POINTS = 10_000_000
OBSERVABLES = ("dtheta", "theta_mean", "sigma", "theta_tilde", "dx", "snr", "f_min")
ORACLE_PRESETS = ("small-alpha", "disentangle", "closed-form-vs-expm")
PHYSICAL_FIELDS = ("mass", "cavity_length", "omega_c", "omega_m")


def default_log_level() -> str:
    return os.getenv("CAVPHASE_LOG_LEVEL", "INFO").upper()


def default_workers() -> int:
    raw = os.getenv("CAVPHASE_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"CAVPHASE_WORKERS must be an integer, got {raw!r}")


class Command(str, Enum):
    FIGURE1 = "figure1"
    FIGURE2 = "figure2"
    FIGURE3 = "figure3"
    FIGURE4 = "figure4"
    FIGURE5 = "figure5"
    PHASE_DIST = "phase-dist"
    QUADRATURE = "quadrature"
    SQL = "sql"
    ORACLE_CHECK = "oracle-check"
    SWEEP = "sweep"
    HISTORY = "history"

    @property
    def figure_number(self) -> Optional[int]:
        return int(self.value[-1]) if self.value.startswith("figure") else None


class SweepAxis(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: Literal["k", "tau", "alpha", "phi"]
    start: float
    stop: float
    count: int = Field(..., ge=0)

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """AXIS=START:STOP:COUNT"""
        try:
            name, bounds = text.split("=", 1)
            start, stop, count = bounds.split(":")
            return cls(name=name.strip(), start=float(start), stop=float(stop), count=int(count))
        except ValueError as e:
            raise ConfigError(f"sweep axis must look like AXIS=START:STOP:COUNT, got {text!r}") from e

    def values(self):
        if self.count == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.count - 1) if self.count > 1 else 0.0
        return [self.start + i * step for i in range(self.count)]


class RunConfig(BaseModel):
    """Validated parameters of one CLI run."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command
    k: Optional[float] = Field(None, gt=0, description="Scaled coupling.")
    tau: Optional[float] = Field(None, ge=0, description="Scaled time omega_m t.")
    alpha: Optional[float] = Field(None, ge=0, description="Field amplitude |alpha|.")
    phi_alpha: float = Field(0.0, description="Field phase arg(alpha).")
    beta_re: float = Field(0.0, description="Mirror amplitude, real part.")
    beta_im: float = Field(0.0, description="Mirror amplitude, imaginary part.")
    phi: float = Field(0.0, description="Local-oscillator phase.")
    grid: int = Field(DEFAULT_GRID, ge=16, le=1 << 22, description="Phase grid size.")
    ncut_field: Optional[int] = Field(None, ge=0, description="Field Fock cutoff.")
    ncut_mirror: Optional[int] = Field(None, ge=0, description="Mirror Fock cutoff.")
    out: str = Field("cavphase_out", description="Output file stem.")
    format: OutputFormat = Field(OutputFormat.CSV, description="csv, svg or both.")
    strategy: CoeffStrategy = Field(CoeffStrategy.AUTO, description="Heterodyne coefficient route.")
    points: Optional[int] = Field(None, ge=0, description="Abscissa point count override.")
    range: Optional[Tuple[float, float]] = Field(None, description="Abscissa START:STOP override.")
    preset: Optional[str] = Field(None, description="oracle-check preset, or 'ligo' for physical parameters.")
    sweep: Tuple[SweepAxis, ...] = Field((), description="Up to two swept axes.")
    observables: Tuple[str, ...] = Field(("dtheta", "sigma"), description="Sweep output columns.")
    force: float = Field(0.0, description="Constant mirror force in N.")
    time: float = Field(1e-3, gt=0, description="Measurement time in s for the sql command.")
    mass: Optional[float] = Field(None, gt=0)
    cavity_length: Optional[float] = Field(None, gt=0)
    omega_c: Optional[float] = Field(None, gt=0)
    omega_m: Optional[float] = Field(None, gt=0)
    omega_0: Optional[float] = Field(None, gt=0)
    workers: int = Field(1, ge=1, description="Process pool size for sweeps.")

    @field_validator("range", mode="before")
    @classmethod
    def _parse_range(cls, value: Any):
        if isinstance(value, str):
            parts = value.split(":")
            if len(parts) != 2:
                raise ValueError(f"range must be START:STOP, got {value!r}")
            return tuple(float(part) for part in parts)
        return value

    @field_validator("sweep", mode="before")
    @classmethod
    def _parse_sweep(cls, value: Any):
        if isinstance(value, str):
            value = [part for part in value.split(",") if part.strip()]
        if isinstance(value, (list, tuple)):
            return tuple(SweepAxis.parse(item) if isinstance(item, str) else item for item in value)
        return value

    @field_validator("observables", mode="before")
    @classmethod
    def _parse_observables(cls, value: Any):
        if isinstance(value, str):
            value = tuple(part.strip() for part in value.split(",") if part.strip())
        return value

    @field_validator("observables")
    @classmethod
    def _known_observables(cls, value: Tuple[str, ...]) -> Tuple[str, ...]:
        unknown = [name for name in value if name not in OBSERVABLES]
        if unknown:
            raise ValueError(f"unknown observables {unknown}; choose from {', '.join(OBSERVABLES)}")
        return value

    @model_validator(mode="after")
    def _check_command(self) -> "RunConfig":
        if self.range is not None and not all(math.isfinite(v) for v in self.range):
            raise ValueError("range bounds must be finite")
        if len(self.sweep) > 2:
            raise ValueError(f"at most two sweep axes, got {len(self.sweep)}")
        if len({axis.name for axis in self.sweep}) != len(self.sweep):
            raise ValueError("sweep axes must be distinct")
        size = math.prod(axis.count for axis in self.sweep) if self.sweep else 0
        if size > MAX_SWEEP_POINTS:
            raise ValueError(f"sweep of {size} points exceeds the limit of {MAX_SWEEP_POINTS}")
        if self.command is Command.SWEEP and not self.sweep:
            raise ValueError("sweep needs at least one --sweep AXIS=START:STOP:COUNT")
        if self.command is Command.ORACLE_CHECK and self.preset not in ORACLE_PRESETS:
            raise ValueError(f"oracle-check needs --preset from {', '.join(ORACLE_PRESETS)}")
        if self.command is Command.SQL and self.preset not in (None, "ligo"):
            raise ValueError(f"sql accepts only --preset ligo, got {self.preset!r}")
        if self.command is Command.SQL and self.preset is None:
            missing = [name for name in PHYSICAL_FIELDS if getattr(self, name) is None]
            if missing:
                raise ValueError(f"sql needs --preset ligo or all of {', '.join(missing)}")
        return self

    @property
    def beta(self) -> complex:
        return complex(self.beta_re, self.beta_im)

    @property
    def alpha_complex(self) -> complex:
        return complex(self.alpha or 0.0) * complex(math.cos(self.phi_alpha), math.sin(self.phi_alpha))

    def sweep_size(self) -> int:
        return math.prod(axis.count for axis in self.sweep) if self.sweep else 0


def config_key(raw: str) -> str:
    return raw.strip().lstrip("-").replace("-", "_")


def load_config_file(path: str) -> Dict[str, str]:
    """Parse key=value lines. '#' starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ReportError(f"Cannot read config file {path}: {e}", path) from e

    allowed = set(RunConfig.model_fields) - {"command"}
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        key = config_key(key)
        if key not in allowed:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    logger.debug("Loaded %d keys from %s", len(values), path)
    return values


def build_run_config(command: str, flags: Dict[str, Any], config_path: Optional[str] = None) -> RunConfig:
    """Merge the config file under explicit flags (None means not given) and validate."""
    merged: Dict[str, Any] = {"workers": default_workers()}
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update({key: value for key, value in flags.items() if value is not None})
    merged["command"] = command
    return RunConfig.model_validate(merged)
