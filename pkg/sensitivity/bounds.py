"""Stability and error guarantees under constant bearing-measurement errors."""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from localizability.conditions import check_algebraic
from networks.exceptions import SingularPerturbedSystem, StepTooLarge
from protocols.direct import solve_direct
from protocols.flow import (
    STABILITY_LIMIT,
    FlowConfig,
    default_initial_estimate,
    integrate_flow,
    nodewise_velocity,
)

logger = logging.getLogger(__name__)

# slack for comparing norms that are equal in exact arithmetic
NORM_SLACK = 1e-12


@dataclass(frozen=True)
class NormCheck:
    delta_ff_norm: float
    delta_fa_norm: float
    ff_bound_holds: bool
    fa_bound_holds: bool


@dataclass(frozen=True)
class StabilityCheck:
    sufficient_condition_met: bool
    actually_stable: bool
    margin: float
    lambda_min: float
    min_real_eigenvalue: float


@dataclass(frozen=True)
class PerturbedSolution:
    estimate: np.ndarray
    truth: np.ndarray
    error_norm: float


def _within(value, bound):
    return value <= bound + NORM_SLACK * (1.0 + bound)


def norm_checks(scenario):
    """|dB_ff| <= eps and |dB_fa| <= eps/2, spectral norms by dense SVD."""
    delta_ff = float(scipy.linalg.svdvals(scenario.delta_ff)[0]) if scenario.delta_ff.size else 0.0
    delta_fa = float(scipy.linalg.svdvals(scenario.delta_fa)[0]) if scenario.delta_fa.size else 0.0
    return NormCheck(
        delta_ff_norm=delta_ff,
        delta_fa_norm=delta_fa,
        ff_bound_holds=_within(delta_ff, scenario.epsilon),
        fa_bound_holds=_within(delta_fa, scenario.epsilon / 2.0),
    )


def stability_check(scenario, laplacian, loc_tol=None):
    """eps < lambda_min(B_ff) guarantees a positive stable B~_ff; not conversely.

    Actual stability is decided from the eigenvalues of B~_ff directly.
    """
    algebraic = check_algebraic(laplacian, loc_tol)
    eigenvalues = scipy.linalg.eigvals(scenario.ff)
    min_real = float(eigenvalues.real.min())
    return StabilityCheck(
        sufficient_condition_met=scenario.epsilon < algebraic.lambda_min,
        actually_stable=min_real > algebraic.tolerance,
        margin=algebraic.lambda_min - scenario.epsilon,
        lambda_min=algebraic.lambda_min,
        min_real_eigenvalue=min_real,
    )


def error_bound(scenario, laplacian, positions, loc_tol=None):
    """eps / (lambda_min - eps) * (|p_a| / 2 + |p_f|), or None when eps >= lambda_min."""
    lambda_min = check_algebraic(laplacian, loc_tol).lambda_min
    epsilon = scenario.epsilon
    if epsilon >= lambda_min:
        return None
    scale = 0.5 * np.linalg.norm(positions.anchors) + np.linalg.norm(positions.followers)
    return float(epsilon / (lambda_min - epsilon) * scale)


def _check_perturbed_block(scenario):
    s = scipy.linalg.svdvals(scenario.ff)
    tol = s.size * np.finfo(float).eps * s[0]
    if s[-1] <= tol:
        raise SingularPerturbedSystem(
            f"perturbed B_ff is singular (sigma_min={s[-1]:.3e})"
        )
    return float(s[0])


def perturbed_solve(scenario, laplacian, p_a, p_f=None):
    """p~_f = -B~_ff^{-1} B~_fa p_a by LU, with the error against the true p_f.

    Without ``p_f`` the truth is recovered from the exact bearings.
    """
    p_a = np.asarray(p_a, dtype=float).reshape(-1)
    _check_perturbed_block(scenario)
    lu, piv = scipy.linalg.lu_factor(scenario.ff)
    estimate = scipy.linalg.lu_solve((lu, piv), -scenario.fa @ p_a)
    truth = solve_direct(laplacian, p_a) if p_f is None else np.asarray(p_f, dtype=float)
    error = float(np.linalg.norm(estimate - truth))
    logger.debug("perturbed solve error %.4e (epsilon %.4e)", error, scenario.epsilon)
    return PerturbedSolution(estimate, truth, error)


def simulate_perturbed_flow(
    scenario,
    p_a,
    initial_estimate=None,
    config: Optional[FlowConfig] = None,
    truth=None,
    nodewise=False,
    rng=None,
):
    """The localization protocol driven by measured bearings.

    The automatic step is 1/sigma_max(B~_ff), which bounds every eigenvalue
    modulus of the nonsymmetric block.
    """
    if config is None:
        config = FlowConfig.from_settings()
    sigma_max = _check_perturbed_block(scenario)
    if config.step_size == "auto":
        h = 1.0 / sigma_max
    else:
        h = float(config.step_size)
        if h * sigma_max >= STABILITY_LIMIT:
            raise StepTooLarge(
                f"step {h:g} times sigma_max {sigma_max:.4g} is not below {STABILITY_LIMIT:g}"
            )
    d = scenario.dimension
    if initial_estimate is None:
        if rng is None:
            rng = np.random.default_rng(scenario.seed)
        initial_estimate = default_initial_estimate(
            p_a, scenario.ff.shape[0] // d, d, rng
        )

    velocity = None
    if nodewise:
        def velocity(estimate):
            return nodewise_velocity(scenario.table, estimate, p_a, d, scenario.n_anchors)

    return integrate_flow(
        scenario.ff,
        scenario.fa,
        p_a,
        initial_estimate,
        h,
        config,
        d,
        truth=truth,
        velocity=velocity,
    )


@dataclass(frozen=True)
class SensitivityResult:
    scenario: object
    norms: NormCheck
    stability: StabilityCheck
    bound: Optional[float]
    solution: Optional[PerturbedSolution]

    @property
    def bound_holds(self):
        if self.bound is None or self.solution is None:
            return None
        return self.solution.error_norm <= self.bound + NORM_SLACK * (1.0 + self.bound)

    def to_dict(self):
        return {
            **self.scenario.to_dict(),
            "lambda_min": self.stability.lambda_min,
            "margin": self.stability.margin,
            "delta_ff_norm": self.norms.delta_ff_norm,
            "delta_fa_norm": self.norms.delta_fa_norm,
            "delta_ff_within_epsilon": self.norms.ff_bound_holds,
            "delta_fa_within_half_epsilon": self.norms.fa_bound_holds,
            "sufficient_condition_met": self.stability.sufficient_condition_met,
            "actually_stable": self.stability.actually_stable,
            "min_real_eigenvalue": self.stability.min_real_eigenvalue,
            "bound": "inapplicable" if self.bound is None else self.bound,
            "realized_error": None if self.solution is None else self.solution.error_norm,
            "bound_holds": self.bound_holds,
        }


def evaluate_scenario(scenario, laplacian, positions, loc_tol=None):
    """Every check for one scenario; the solve is skipped when B~_ff is singular."""
    stability = stability_check(scenario, laplacian, loc_tol)
    try:
        solution = perturbed_solve(scenario, laplacian, positions.anchors, positions.followers)
    except SingularPerturbedSystem:
        logger.warning("perturbed system singular for seed %s", scenario.seed)
        solution = None
    return SensitivityResult(
        scenario=scenario,
        norms=norm_checks(scenario),
        stability=stability,
        bound=error_bound(scenario, laplacian, positions, loc_tol),
        solution=solution,
    )
