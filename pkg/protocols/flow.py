"""Discrete-time simulation of the distributed localization protocol.

Each follower moves along -sum_j P_ij (p_i - p_j) over its neighbors. Stacked,
that is the gradient flow dp_f/dt = -(B_ff p_f + B_fa p_a), integrated here
with explicit Euler steps. Updates are synchronous (Jacobi): every follower
reads the estimates of the previous step.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
import scipy.linalg
from django.conf import settings
from scipy.spatial.distance import pdist

from networks.exceptions import SingularSystem, StepTooLarge

logger = logging.getLogger(__name__)

STABILITY_LIMIT = 2.0


@dataclass(frozen=True)
class FlowConfig:
    step_size: Union[float, str] = "auto"
    max_steps: int = 100000
    convergence_tol: float = 1e-9
    record_every: int = 1

    def __post_init__(self):
        if self.step_size != "auto" and not float(self.step_size) > 0.0:
            raise ValueError(f"step_size must be positive or 'auto', got {self.step_size!r}")
        if self.max_steps < 0:
            raise ValueError("max_steps must be non-negative")
        if not self.convergence_tol > 0.0:
            raise ValueError("convergence_tol must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")

    @classmethod
    def from_settings(cls, **overrides):
        defaults = settings.BEARING_FLOW
        values = {
            "step_size": defaults.get("STEP_SIZE", "auto"),
            "max_steps": defaults.get("MAX_STEPS", 100000),
            "convergence_tol": defaults.get("CONVERGENCE_TOL", 1e-9),
            "record_every": defaults.get("RECORD_EVERY", 1),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class FlowRecord:
    step: int
    time: float
    estimate: np.ndarray  # follower block, internal order
    velocity_inf_norm: float
    error_norm: Optional[float] = None


@dataclass
class FlowTrajectory:
    step_size: float
    dimension: int
    records: list[FlowRecord] = field(default_factory=list)
    converged: bool = False

    @property
    def final(self):
        return self.records[-1]

    @property
    def steps(self):
        return self.final.step

    @property
    def status(self):
        return "converged" if self.converged else "step-limited"

    @property
    def final_estimate(self):
        return self.final.estimate

    @property
    def final_error(self):
        return self.final.error_norm


def default_initial_estimate(p_a, n_followers, dimension, rng):
    """Anchor centroid plus uniform noise as wide as the anchor spread.

    The follower positions may be unknown, so the spread of the anchors
    stands in for the network diameter.
    """
    anchors = np.asarray(p_a, dtype=float).reshape(-1, dimension)
    diameter = float(pdist(anchors).max(initial=0.0)) if len(anchors) > 1 else 0.0
    diameter = diameter or 1.0
    centroid = anchors.mean(axis=0) if len(anchors) else np.zeros(dimension)
    noise = rng.uniform(-diameter, diameter, size=(n_followers, dimension))
    return (centroid + noise).reshape(-1)


def nodewise_velocity(table, estimate, p_a, dimension, n_anchors):
    """Per-follower update; ``table`` maps follower index -> [(j, P_ij), ...]."""
    d = dimension
    x = np.asarray(estimate, dtype=float).reshape(-1, d)
    anchors = np.asarray(p_a, dtype=float).reshape(-1, d)
    velocity = np.zeros_like(x)
    for i, neighbors in table.items():
        p_i = x[i - n_anchors]
        for j, P in neighbors:
            p_j = anchors[j] if j < n_anchors else x[j - n_anchors]
            velocity[i - n_anchors] -= P @ (p_i - p_j)
    return velocity.reshape(-1)


def protocol_velocity(laplacian, estimate, p_a):
    return nodewise_velocity(
        laplacian.neighbor_projectors(),
        estimate,
        p_a,
        laplacian.dimension,
        laplacian.n_anchors,
    )


def integrate_flow(
    ff,
    fa,
    p_a,
    initial,
    step_size,
    config,
    dimension,
    truth=None,
    velocity: Optional[Callable] = None,
):
    """Explicit Euler on dx/dt = -(ff x + fa p_a) until the velocity vanishes."""
    p_a = np.asarray(p_a, dtype=float).reshape(-1)
    x = np.array(initial, dtype=float).reshape(-1)
    truth = None if truth is None else np.asarray(truth, dtype=float).reshape(-1)
    forcing = fa @ p_a
    if velocity is None:
        def velocity(estimate):
            return -(ff @ estimate + forcing)

    trajectory = FlowTrajectory(step_size=step_size, dimension=dimension)
    for k in range(config.max_steps + 1):
        v = velocity(x)
        v_norm = float(np.abs(v).max(initial=0.0))
        done = v_norm < config.convergence_tol
        last = done or k == config.max_steps
        if k % config.record_every == 0 or last:
            trajectory.records.append(
                FlowRecord(
                    step=k,
                    time=k * step_size,
                    estimate=x.copy(),
                    velocity_inf_norm=v_norm,
                    error_norm=None if truth is None else float(np.linalg.norm(x - truth)),
                )
            )
        if done:
            trajectory.converged = True
            break
        if last:
            break
        x = x + step_size * v

    if trajectory.converged:
        logger.info("flow converged after %d steps", trajectory.steps)
    else:
        logger.warning("flow hit the step limit (%d) before converging", config.max_steps)
    return trajectory


def simulate_flow(
    laplacian,
    p_a,
    initial_estimate=None,
    config: Optional[FlowConfig] = None,
    truth=None,
    nodewise=False,
    rng=None,
):
    """Run the localization protocol from ``initial_estimate``.

    ``nodewise`` evaluates every step through per-follower neighbor sums
    instead of the stacked matrix product; both give the same iterates.
    """
    if config is None:
        config = FlowConfig.from_settings()
    ff, fa = laplacian.ff, laplacian.fa
    lambda_max = scipy.linalg.eigvalsh(ff)[-1]
    # no follower measures any bearing: nothing drives the flow
    if lambda_max <= np.finfo(float).eps * max(1.0, float(np.abs(ff).max(initial=0.0))):
        raise SingularSystem(
            f"B_ff vanishes (lambda_max={lambda_max:.3e}); followers have no edges"
        )
    if config.step_size == "auto":
        h = 1.0 / lambda_max
    else:
        h = float(config.step_size)
        if h * lambda_max >= STABILITY_LIMIT:
            raise StepTooLarge(
                f"step {h:g} times lambda_max {lambda_max:.4g} is not below {STABILITY_LIMIT:g}"
            )

    if initial_estimate is None:
        if rng is None:
            rng = np.random.default_rng(settings.BEARING_DEFAULT_SEED)
        initial_estimate = default_initial_estimate(
            p_a, laplacian.n_followers, laplacian.dimension, rng
        )

    velocity = None
    if nodewise:
        table = laplacian.neighbor_projectors()

        def velocity(estimate):
            return nodewise_velocity(
                table, estimate, p_a, laplacian.dimension, laplacian.n_anchors
            )

    return integrate_flow(
        ff,
        fa,
        p_a,
        initial_estimate,
        h,
        config,
        laplacian.dimension,
        truth=truth,
        velocity=velocity,
    )
