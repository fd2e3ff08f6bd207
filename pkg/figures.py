"""
Tables behind the figure commands and the single-point commands (phase-dist,
quadrature, sql). Each builder returns a FigureResult; reporting writes it.
"""

import logging
import math
from functools import partial
from multiprocessing import Pool
from typing import Callable, Dict, List, Sequence

import numpy as np
import pandas as pd

from params import InitialState, SystemParams, derive_dimensionless, evolution_point, phase_zeta
from phase import (
    CoeffStrategy,
    PhaseMethod,
    approx_series_moments,
    gaussian_approx,
    gaussian_comb_distribution,
    gaussian_distribution,
    p_canonical,
    p_q_dist,
    p_q_general_beta,
    phase_moments,
    required_fock_cutoff,
    wrap_phase,
)
from quadrature import (
    decay_exponent,
    min_variance_approx,
    minimize_variance,
    quadrature_variance,
    quadrature_variance_approx,
)
from reporting import FigureResult
from run_config import Command, RunConfig
from sql import ligo_preset, qm_identity_check, scheme_sensitivity, sensor_limits

logger = logging.getLogger(__name__)

# k, tau, |alpha| used by each figure unless overridden
FIGURE_DEFAULTS: Dict[int, Dict[str, float]] = {
    1: {"k": 7.0, "tau": 0.01},
    2: {"k": 7.0, "tau": 0.01},
    3: {"k": 7.0, "alpha": 500.0},
    4: {"k": 3.3, "tau": 0.01},
    5: {"k": 3.3},
}
FIGURE4_ALPHAS = (1e3, 3e3, 1e4)
FIGURE5_TAUS = (0.05, 0.02, 0.01, 0.005)


def parallel_map(func: Callable, items: Sequence, workers: int = 1) -> List:
    """Order-preserving map, in a process pool when workers > 1."""
    if workers <= 1 or len(items) < 2:
        return [func(item) for item in items]
    chunksize = max(1, len(items) // (4 * workers))
    with Pool(processes=workers) as pool:
        return pool.map(func, items, chunksize=chunksize)


def _diagnostics(mean: float, center: float, sigma: float, in_regime: bool) -> str:
    flags = []
    # a distribution split across the cut at +-pi has its mean near 0, so test the centre too
    if max(abs(mean), abs(center)) > math.pi - 3.0 * sigma:
        flags.append("wrap")
    if not in_regime:
        flags.append("regime")
    return ";".join(flags)


def phase_scan_point(alpha_abs: float, k: float, tau: float,
                     strategy: CoeffStrategy = CoeffStrategy.AUTO) -> Dict[str, float]:
    """
    Exact heterodyne moments and the Gaussian-series moments at one point, zeta = phi_alpha = 0.
    At tau = 0 the Gaussian columns are NaN and the row is flagged "regime".
    """
    ep = evolution_point(tau)
    ep.zeta = 0.0
    exact = phase_moments(InitialState(alpha=complex(alpha_abs)), ep, k, PhaseMethod.HETERODYNE, strategy)
    row = {"alpha_abs": alpha_abs, "tau": tau, "dtheta_exact": exact.uncertainty, "theta_mean_exact": exact.mean}
    if not tau > 0:
        row.update(dtheta_approx=math.nan, sigma=math.nan, theta_mean_approx=math.nan, theta_tilde=math.nan,
                   diagnostics=_diagnostics(exact.mean, exact.mean, exact.uncertainty, False))
        return row
    ga = gaussian_approx(k, tau, alpha_abs)
    approx = approx_series_moments(ga)
    row.update(dtheta_approx=approx.uncertainty, sigma=ga.sigma, theta_mean_approx=approx.mean,
               theta_tilde=wrap_phase(ga.theta_tilde),
               diagnostics=_diagnostics(exact.mean, ga.center, ga.sigma, ga.in_regime))
    return row


def _abscissa(config: RunConfig, start: float, stop: float, points: int, log: bool = False,
              endpoint: bool = True) -> np.ndarray:
    if config.range is not None:
        start, stop = config.range
    count = config.points if config.points is not None else points
    if log:
        return np.logspace(math.log10(start), math.log10(stop), count)
    return np.linspace(start, stop, count, endpoint=endpoint)


def _setting(config: RunConfig, n: int, name: str) -> float:
    value = getattr(config, name)
    return value if value is not None else FIGURE_DEFAULTS[n][name]


def _figure_phase_vs_alpha(n: int, config: RunConfig) -> FigureResult:
    k, tau = _setting(config, n, "k"), _setting(config, n, "tau")
    alphas = _abscissa(config, 10.0, 1000.0, 400)
    rows = parallel_map(partial(phase_scan_point, k=k, tau=tau, strategy=config.strategy),
                        [float(a) for a in alphas], config.workers)
    if n == 1:
        columns = ["alpha_abs", "dtheta_exact", "dtheta_approx", "sigma", "theta_mean_exact", "diagnostics"]
        y_columns, y_label, title = ["dtheta_exact", "dtheta_approx", "sigma"], "Delta theta", "Phase uncertainty"
    else:
        columns = ["alpha_abs", "theta_mean_exact", "theta_mean_approx", "theta_tilde", "diagnostics"]
        y_columns, y_label, title = ["theta_mean_exact", "theta_mean_approx"], "mean theta", "Mean phase"
    frame = pd.DataFrame(rows, columns=columns)
    return FigureResult(name=f"figure{n}", title=f"{title}, k={k:g}, tau={tau:g}", frame=frame,
                        x_column="alpha_abs", y_columns=y_columns, x_label="|alpha|", y_label=y_label,
                        warnings=int((frame["diagnostics"] != "").sum()))


def _scan_tau(tau: float, k: float, alpha_abs: float, strategy: CoeffStrategy) -> Dict[str, float]:
    return phase_scan_point(alpha_abs, k, tau, strategy)


def _figure3(config: RunConfig) -> FigureResult:
    k, alpha_abs = _setting(config, 3, "k"), _setting(config, 3, "alpha")
    count = config.points if config.points is not None else 200
    if config.range is not None:
        taus = _abscissa(config, 0.0, 0.05, count)
    else:
        taus = np.linspace(0.05 / count, 0.05, count) if count else np.array([])
    rows = parallel_map(partial(_scan_tau, k=k, alpha_abs=alpha_abs, strategy=config.strategy),
                        [float(t) for t in taus], config.workers)
    frame = pd.DataFrame(rows, columns=["tau", "dtheta_exact", "dtheta_approx", "sigma", "theta_mean_exact", "diagnostics"])
    return FigureResult(name="figure3", title=f"Phase uncertainty, k={k:g}, |alpha|={alpha_abs:g}", frame=frame,
                        x_column="tau", y_columns=["dtheta_exact", "dtheta_approx", "sigma"], x_label="tau",
                        y_label="Delta theta", warnings=int((frame["diagnostics"] != "").sum()))


def _figure4(config: RunConfig) -> FigureResult:
    k, tau = _setting(config, 4, "k"), _setting(config, 4, "tau")
    alphas = (config.alpha,) if config.alpha is not None else FIGURE4_ALPHAS
    phis = _abscissa(config, 0.0, math.pi, 360, endpoint=False)
    ep = evolution_point(tau)
    ep.zeta = 0.0
    data: Dict[str, List[float]] = {"phi": [float(p) for p in phis]}
    y_columns = []
    for alpha_abs in alphas:
        label = f"a{alpha_abs:g}"
        exact, approx = [], []
        for phi in phis:
            exact.append(math.sqrt(quadrature_variance(float(phi), complex(alpha_abs), ep, k).variance))
            approx.append(math.sqrt(quadrature_variance_approx(float(phi), complex(alpha_abs), ep, k)[0]))
        data[f"dx_exact_{label}"] = exact
        data[f"dx_approx_{label}"] = approx
        y_columns += [f"dx_exact_{label}", f"dx_approx_{label}"]
    return FigureResult(name="figure4", title=f"Quadrature uncertainty, k={k:g}, tau={tau:g}",
                        frame=pd.DataFrame(data), x_column="phi", y_columns=y_columns, x_label="phi",
                        y_label="Delta X", log_y=True)


def _min_quadrature_point(alpha_abs: float, k: float, taus: Sequence[float]) -> Dict[str, float]:
    row = {"alpha_abs": alpha_abs}
    for tau in taus:
        ep = evolution_point(tau)
        ep.zeta = 0.0
        _, best = minimize_variance(complex(alpha_abs), ep, k)
        row[f"dx_min_exact_tau{tau:g}"] = best.uncertainty
        row[f"dx_min_approx_tau{tau:g}"] = math.sqrt(min_variance_approx(alpha_abs, decay_exponent(k, tau, alpha_abs)))
    return row


def _figure5(config: RunConfig) -> FigureResult:
    k = _setting(config, 5, "k")
    taus = (config.tau,) if config.tau is not None else FIGURE5_TAUS
    alphas = _abscissa(config, 10.0, 1e5, 81, log=True)
    rows = parallel_map(partial(_min_quadrature_point, k=k, taus=taus), [float(a) for a in alphas], config.workers)
    columns = ["alpha_abs"]
    for tau in taus:
        columns += [f"dx_min_exact_tau{tau:g}", f"dx_min_approx_tau{tau:g}"]
    return FigureResult(name="figure5", title=f"Minimum quadrature uncertainty, k={k:g}",
                        frame=pd.DataFrame(rows, columns=columns), x_column="alpha_abs", y_columns=columns[1:],
                        x_label="|alpha|", y_label="min Delta X", log_x=True, log_y=True)


def run_figure(n: int, config: RunConfig) -> FigureResult:
    if n in (1, 2):
        return _figure_phase_vs_alpha(n, config)
    if n == 3:
        return _figure3(config)
    if n == 4:
        return _figure4(config)
    if n == 5:
        return _figure5(config)
    raise ValueError(f"figure number must be 1..5, got {n}")


def phase_dist_table(config: RunConfig) -> FigureResult:
    """Densities of every available route at one (k, tau, alpha, beta) point."""
    k = config.k if config.k is not None else 7.0
    tau = config.tau if config.tau is not None else 0.01
    alpha_abs = config.alpha if config.alpha is not None else 10.0
    state = InitialState(alpha=alpha_abs * complex(math.cos(config.phi_alpha), math.sin(config.phi_alpha)),
                         beta=config.beta)
    ep = evolution_point(tau)
    zeta = phase_zeta(ep, k, state.beta)
    columns = {}
    clamped = 0
    if state.beta == 0:
        dists = {
            "canonical": p_canonical(state, ep, k, config.grid),
            "heterodyne": p_q_dist(state, ep, k, config.grid, config.strategy),
        }
    else:
        n_cut = max(config.ncut_field or 0, required_fock_cutoff(alpha_abs))
        dists = {"heterodyne_general_beta": p_q_general_beta(state, ep, k, n_cut, config.grid)}
    if tau > 0:
        ga = gaussian_approx(k, tau, alpha_abs, zeta, config.phi_alpha)
        dists["gaussian_comb"] = gaussian_comb_distribution(ga, config.grid)
        dists["gaussian"] = gaussian_distribution(ga, config.grid)
    theta = next(iter(dists.values())).theta_grid
    columns["theta"] = theta
    for name, dist in dists.items():
        columns[name] = dist.density
        clamped += dist.clamped
        moments = dist.moments()
        logger.info("%s: integral %.12f, mean %.6g, Delta theta %.6g",
                    name, dist.integral(), moments.mean, moments.uncertainty)
    return FigureResult(name="phase-dist", title=f"Phase distributions, k={k:g}, tau={tau:g}, |alpha|={alpha_abs:g}",
                        frame=pd.DataFrame(columns), x_column="theta", y_columns=list(dists), x_label="theta",
                        y_label="P(theta)", clamped=clamped)


def quadrature_table(config: RunConfig) -> FigureResult:
    k = config.k if config.k is not None else 3.3
    tau = config.tau if config.tau is not None else 0.01
    alpha = config.alpha_complex if config.alpha is not None else complex(1e3)
    ep = evolution_point(tau)
    phis = _abscissa(config, 0.0, math.pi, 360, endpoint=False)
    rows = []
    for phi in phis:
        exact = quadrature_variance(float(phi), alpha, ep, k)
        approx, qa = quadrature_variance_approx(float(phi), alpha, ep, k)
        rows.append({"phi": float(phi), "dx_exact": exact.uncertainty, "dx_approx": math.sqrt(approx),
                     "variance_exact": exact.variance, "variance_approx": approx})
    phi_min, best = minimize_variance(alpha, ep, k)
    logger.info("minimum variance %.10g at phi=%.8g; approximate minimum %.10g",
                best.variance, phi_min, min_variance_approx(abs(alpha), decay_exponent(k, tau, abs(alpha))))
    return FigureResult(name="quadrature", title=f"Quadrature uncertainty, k={k:g}, tau={tau:g}, |alpha|={abs(alpha):g}",
                        frame=pd.DataFrame(rows, columns=["phi", "dx_exact", "dx_approx", "variance_exact", "variance_approx"]),
                        x_column="phi", y_columns=["dx_exact", "dx_approx"], x_label="phi", y_label="Delta X")


def system_params(config: RunConfig) -> SystemParams:
    if config.preset == "ligo" or config.mass is None:
        return ligo_preset()
    return SystemParams(mass=config.mass, cavity_length=config.cavity_length, omega_c=config.omega_c,
                        omega_m=config.omega_m, omega_0=config.omega_0)


def sql_table(config: RunConfig) -> FigureResult:
    p = system_params(config)
    dp = derive_dimensionless(p)
    tau = p.omega_m * config.time
    limits = sensor_limits(p, config.time)
    scheme = scheme_sensitivity(p, dp, tau, dp.k * tau, config.force)
    row = {"time": config.time, "k": dp.k, "r": dp.r, "g": dp.g, "tau": tau}
    row.update(limits.model_dump())
    row.update(scheme.model_dump())
    row["qm_identity_residual"] = qm_identity_check(p, dp, config.time)
    return FigureResult(name="sql", title="Quantum limits", frame=pd.DataFrame([row]), x_column="time")


def build_table(config: RunConfig) -> FigureResult:
    """FigureResult for every command that produces a single table."""
    if config.command.figure_number is not None:
        return run_figure(config.command.figure_number, config)
    builders = {
        Command.PHASE_DIST: phase_dist_table,
        Command.QUADRATURE: quadrature_table,
        Command.SQL: sql_table,
    }
    if config.command not in builders:
        raise ValueError(f"{config.command.value} does not produce a figure table")
    return builders[config.command](config)
