"""Whole-network solve and simulate runs shared by the API and the CLI."""
import logging

import numpy as np

from bearings.residuals import linear_residual, nonlinear_residual
from networks.exceptions import CollocatedEstimates
from networks.spec import StackedPosition
from rigidity.matrices import bearing_laplacian
from sensitivity.bounds import simulate_perturbed_flow
from sensitivity.scenario import build_scenario

from .direct import solve_direct
from .flow import FlowConfig, default_initial_estimate, simulate_flow

logger = logging.getLogger(__name__)


def positions_by_node(index_map, vector, dimension, offset=0):
    """Split a stacked block back into ``{node id: [coords]}``."""
    blocks = np.asarray(vector, dtype=float).reshape(-1, dimension)
    return {index_map.id_of(offset + k): block.tolist() for k, block in enumerate(blocks)}


def follower_truth(spec):
    if not all(spec.node(i).position is not None for i in spec.follower_ids):
        return None
    return spec.stacked_positions().followers


def solve_network(spec, loc_tol=None):
    laplacian = bearing_laplacian(spec)
    index_map = laplacian.index_map
    d = spec.dimension
    p_a = spec.anchor_positions()
    p_f = solve_direct(laplacian, p_a, loc_tol)
    estimate = StackedPosition.from_blocks(p_a, p_f, d)

    linear = linear_residual(spec, estimate).max()
    try:
        nonlinear = nonlinear_residual(spec, estimate).max()
    except CollocatedEstimates:
        nonlinear = None
    truth = follower_truth(spec)
    error = None if truth is None else float(np.linalg.norm(p_f - truth))
    relative = None
    if truth is not None and np.linalg.norm(truth) > 0:
        relative = error / float(np.linalg.norm(truth))

    logger.info("solved %d followers, linear residual %.3e", index_map.n_followers, linear)
    return {
        "positions": {
            **positions_by_node(index_map, p_a, d),
            **positions_by_node(index_map, p_f, d, offset=index_map.n_anchors),
        },
        "linear_residual": linear,
        "nonlinear_residual": nonlinear,
        "error_norm": error,
        "relative_error": relative,
    }


def simulate_network(
    spec,
    config=None,
    seed=0,
    angles=None,
    max_angle=None,
    nodewise=False,
):
    """Run the protocol from a seeded random estimate.

    With ``angles`` or ``max_angle`` the followers use measured (perturbed)
    bearings. Returns ``(trajectory, summary)``.
    """
    if config is None:
        config = FlowConfig.from_settings()
    laplacian = bearing_laplacian(spec)
    index_map = laplacian.index_map
    d = spec.dimension
    p_a = spec.anchor_positions()
    truth = follower_truth(spec)
    rng = np.random.default_rng(seed)
    initial = default_initial_estimate(p_a, index_map.n_followers, d, rng)

    scenario = None
    if angles is not None or max_angle is not None:
        scenario = build_scenario(spec, angles, max_angle, seed, laplacian)
        trajectory = simulate_perturbed_flow(
            scenario, p_a, initial, config, truth=truth, nodewise=nodewise
        )
    else:
        trajectory = simulate_flow(
            laplacian, p_a, initial, config, truth=truth, nodewise=nodewise
        )

    final = trajectory.final
    summary = {
        "status": trajectory.status,
        "converged": trajectory.converged,
        "steps": trajectory.steps,
        "step_size": trajectory.step_size,
        "final_time": final.time,
        "final_velocity_inf_norm": final.velocity_inf_norm,
        "final_error": final.error_norm,
        "final_estimate": positions_by_node(
            index_map, final.estimate, d, offset=index_map.n_anchors
        ),
        "perturbed": scenario is not None,
        "epsilon": None if scenario is None else scenario.epsilon,
    }
    return trajectory, summary
