"""
Preset cross-checks of the closed-form routes against the truncated-Fock oracle.
Each preset returns CheckResults whose metric must not exceed its tolerance.
"""

import logging
import math
from typing import Callable, Dict, List

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import poisson

from oracle import (
    analytic_field_density,
    build_initial,
    coherent_projector,
    evolve_closed_form,
    evolve_matrix_exp_scaled,
    fidelity,
    oracle_phase_dist,
    oracle_quadrature,
    recommend_cutoffs,
    recommended_cutoff,
    reduced_field_density,
    reduced_mirror_density,
    trace_distance,
)
from params import InitialState, evolution_point
from phase import PhaseMethod, p_canonical, p_q_dist, p_q_general_beta, required_fock_cutoff
from quadrature import expect_a, expect_a2, quadrature_variance

logger = logging.getLogger(__name__)

SMALL_ALPHA = 2.0
SMALL_K = 0.5
SMALL_R = 3.0
SMALL_TAU = 0.7
CHECK_GRID = 4096
QUADRATURE_PHI = 0.3
POISSON_TAUS = (0.3, 1.0, math.pi, 2.0 * math.pi)
DISENTANGLE_STATES = ((2.0, 0j), (1.5, 0.5 + 0.3j))
DRIVE_LAMBDAS = (0.0, 0.1)


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Check identifier.")
    metric: float = Field(..., description="Measured deviation; smaller is better.")
    tolerance: float = Field(..., gt=0, description="Largest accepted metric.")
    passed: bool = Field(..., description="metric <= tolerance.")


def _check(name: str, metric: float, tolerance: float) -> CheckResult:
    metric = float(metric)
    passed = bool(math.isfinite(metric) and metric <= tolerance)
    log = logger.info if passed else logger.warning
    log("%s: %.3e (tolerance %.1e) %s", name, metric, tolerance, "pass" if passed else "FAIL")
    return CheckResult(name=name, metric=metric, tolerance=tolerance, passed=passed)


def _small_alpha_checks() -> List[CheckResult]:
    alpha = complex(SMALL_ALPHA)
    k, r, tau = SMALL_K, SMALL_R, SMALL_TAU
    ep = evolution_point(tau)
    n_field, n_mirror = recommend_cutoffs(alpha, 0j, ep, k)
    initial = build_initial(alpha, 0j, n_field, n_mirror)
    results = []

    poisson_weights = poisson.pmf(np.arange(n_field + 1), SMALL_ALPHA ** 2)
    worst = 0.0
    for t in POISSON_TAUS:
        rho_t = reduced_field_density(evolve_closed_form(initial, t, k, r, 0.0))
        worst = max(worst, float(np.max(np.abs(rho_t.photon_distribution() - poisson_weights))))
    results.append(_check("poisson_diagonal", worst, 1e-10))

    rho = reduced_field_density(evolve_closed_form(initial, tau, k, r, 0.0))
    analytic = analytic_field_density(alpha, 0j, ep, k, n_field)
    results.append(_check("field_density_vs_analytic", np.max(np.abs(rho.entries - analytic.entries)), 1e-10))
    results.append(_check("field_density_hermitian", rho.hermiticity_error(), 1e-12))

    state = InitialState(alpha=alpha)
    heterodyne = p_q_dist(state, ep, k, CHECK_GRID)
    canonical = p_canonical(state, ep, k, CHECK_GRID)
    general = p_q_general_beta(state, ep, k, required_fock_cutoff(SMALL_ALPHA), CHECK_GRID)
    oracle_heterodyne = oracle_phase_dist(rho, PhaseMethod.HETERODYNE, CHECK_GRID)
    oracle_canonical = oracle_phase_dist(rho, PhaseMethod.CANONICAL, CHECK_GRID)
    results.append(_check("heterodyne_vs_oracle", heterodyne.sup_distance(oracle_heterodyne), 1e-8))
    results.append(_check("general_beta_vs_oracle", general.sup_distance(oracle_heterodyne), 1e-8))
    results.append(_check("canonical_vs_oracle", canonical.sup_distance(oracle_canonical), 1e-8))
    worst_integral = max(abs(d.integral() - 1.0) for d in (heterodyne, general, oracle_heterodyne))
    results.append(_check("heterodyne_normalization", worst_integral, 1e-6))

    oracle_x = oracle_quadrature(rho, QUADRATURE_PHI)
    results.append(_check("mean_a_vs_oracle", abs(expect_a(alpha, ep, k) - oracle_x.mean_a), 1e-9))
    results.append(_check("mean_a2_vs_oracle", abs(expect_a2(alpha, ep, k) - oracle_x.mean_a2), 1e-9))
    exact_x = quadrature_variance(QUADRATURE_PHI, alpha, ep, k)
    results.append(_check("quadrature_variance_vs_oracle", abs(exact_x.variance - oracle_x.variance), 1e-9))
    results.append(_check("photon_number", abs(oracle_x.photon_number - SMALL_ALPHA ** 2), 1e-9))
    return results


def _disentangle_checks() -> List[CheckResult]:
    results = []
    for alpha_abs, beta in DISENTANGLE_STATES:
        label = f"a{alpha_abs:g}_b{beta.real:g}{beta.imag:+g}i"
        for cycles in (1, 2):
            tau = 2.0 * math.pi * cycles
            n_field, n_mirror = recommend_cutoffs(complex(alpha_abs), beta, evolution_point(tau), SMALL_K)
            s = evolve_closed_form(build_initial(complex(alpha_abs), beta, n_field, n_mirror),
                                   tau, SMALL_K, SMALL_R, 0.0)
            results.append(_check(f"purity_{label}_tau{2 * cycles}pi",
                                  abs(1.0 - reduced_field_density(s).purity()), 1e-9))
            if cycles == 1:
                distance = trace_distance(reduced_mirror_density(s), coherent_projector(beta, n_mirror))
                results.append(_check(f"mirror_return_{label}", distance, 1e-8))
    return results


def _closed_form_vs_expm_checks() -> List[CheckResult]:
    alpha = complex(SMALL_ALPHA)
    results = []
    for lam in DRIVE_LAMBDAS:
        ep = evolution_point(SMALL_TAU, lam)
        n_field, n_mirror = recommend_cutoffs(alpha, 0j, ep, SMALL_K)
        initial = build_initial(alpha, 0j, n_field, n_mirror)
        closed = evolve_closed_form(initial, SMALL_TAU, SMALL_K, SMALL_R, lam)
        direct = evolve_matrix_exp_scaled(initial, SMALL_K, SMALL_R, lam, SMALL_TAU)
        results.append(_check(f"fidelity_lambda{lam:g}", 1.0 - fidelity(closed, direct), 1e-8))

        long_run = evolve_matrix_exp_scaled(initial, SMALL_K, SMALL_R, lam, 4.0 * math.pi)
        results.append(_check(f"norm_drift_lambda{lam:g}", abs(long_run.norm() - initial.norm()), 1e-10))
    return results


PRESETS: Dict[str, Callable[[], List[CheckResult]]] = {
    "small-alpha": _small_alpha_checks,
    "disentangle": _disentangle_checks,
    "closed-form-vs-expm": _closed_form_vs_expm_checks,
}


def run_oracle_check(preset: str) -> List[CheckResult]:
    if preset not in PRESETS:
        raise ValueError(f"unknown oracle preset {preset!r}; choose from {', '.join(PRESETS)}")
    logger.info("Running oracle preset %s (field cutoff %d at |alpha|=%g)",
                preset, recommended_cutoff(SMALL_ALPHA), SMALL_ALPHA)
    return PRESETS[preset]()


def checks_frame(results: List[CheckResult]) -> pd.DataFrame:
    return pd.DataFrame([r.model_dump() for r in results], columns=["name", "metric", "tolerance", "passed"])
