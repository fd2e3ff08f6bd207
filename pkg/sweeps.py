"""Cartesian parameter sweeps over up to two of k, tau, alpha and phi."""

import itertools
import logging
import math
from functools import partial
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from figures import parallel_map, system_params
from params import DimensionlessParams, InitialState, SystemParams, derive_dimensionless, evolution_point
from phase import CoeffStrategy, PhaseMethod, gaussian_approx, phase_moments
from quadrature import quadrature_variance
from reporting import FigureResult
from run_config import RunConfig
from sql import scheme_sensitivity

logger = logging.getLogger(__name__)

# values of the axes that are not swept
SWEEP_DEFAULTS = {"k": 7.0, "tau": 0.01, "alpha": 100.0, "phi": 0.0}
PHASE_OBSERVABLES = {"dtheta", "theta_mean"}
GAUSSIAN_OBSERVABLES = {"sigma", "theta_tilde"}
SENSOR_OBSERVABLES = {"snr", "f_min"}


def fixed_values(config: RunConfig) -> Dict[str, float]:
    values = dict(SWEEP_DEFAULTS)
    for name in ("k", "tau", "alpha"):
        if getattr(config, name) is not None:
            values[name] = getattr(config, name)
    values["phi"] = config.phi
    return values


def sweep_point(values: Tuple[float, ...], names: Tuple[str, ...], fixed: Dict[str, float],
                observables: Tuple[str, ...], phi_alpha: float, strategy: CoeffStrategy,
                physical: Optional[SystemParams], force: float) -> Dict[str, float]:
    point = dict(fixed)
    point.update(zip(names, values))
    k, tau, alpha_abs, phi = point["k"], point["tau"], point["alpha"], point["phi"]
    alpha = alpha_abs * complex(math.cos(phi_alpha), math.sin(phi_alpha))
    ep = evolution_point(tau)
    row = {name: point[name] for name in names}

    wanted = set(observables)
    if wanted & PHASE_OBSERVABLES:
        moments = phase_moments(InitialState(alpha=alpha), ep, k, PhaseMethod.HETERODYNE, strategy)
        row["dtheta"] = moments.uncertainty
        row["theta_mean"] = moments.mean
    if wanted & GAUSSIAN_OBSERVABLES:
        if tau > 0:
            ga = gaussian_approx(k, tau, alpha_abs, ep.zeta or 0.0, phi_alpha)
            row["sigma"], row["theta_tilde"] = ga.sigma, ga.theta_tilde
        else:
            row["sigma"], row["theta_tilde"] = 0.0, phi_alpha
    if "dx" in wanted:
        row["dx"] = quadrature_variance(phi, alpha, ep, k).uncertainty
    if wanted & SENSOR_OBSERVABLES:
        dp: DimensionlessParams = derive_dimensionless(physical)
        if tau > 0:
            scheme = scheme_sensitivity(physical, dp, tau, dp.k * tau, force)
            row["snr"], row["f_min"] = scheme.snr, scheme.f_min
        else:
            row["snr"], row["f_min"] = 0.0, math.inf
    return {key: row[key] for key in list(names) + list(observables)}


def sweep_grid(config: RunConfig) -> List[Tuple[float, ...]]:
    """Points in lexicographic axis order, the first axis varying slowest."""
    return list(itertools.product(*(axis.values() for axis in config.sweep)))


def run_sweep(config: RunConfig) -> FigureResult:
    names = tuple(axis.name for axis in config.sweep)
    columns: Sequence[str] = list(names) + list(config.observables)
    physical = system_params(config) if set(config.observables) & SENSOR_OBSERVABLES else None
    grid = sweep_grid(config)
    logger.info("Sweeping %s over %d points with %d worker(s)", " x ".join(names), len(grid), config.workers)

    worker = partial(sweep_point, names=names, fixed=fixed_values(config), observables=config.observables,
                     phi_alpha=config.phi_alpha, strategy=config.strategy, physical=physical, force=config.force)
    rows = parallel_map(worker, grid, config.workers)
    frame = pd.DataFrame(rows, columns=columns)
    return FigureResult(name="sweep", title=f"Sweep over {', '.join(names)}", frame=frame, x_column=names[0],
                        y_columns=list(config.observables) if len(names) == 1 else [], x_label=names[0])
