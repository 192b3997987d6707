"""Per-constraint residuals of the bearing localization equations.

The nonlinear system asks every estimated edge to point along its bearing;
the linear system only asks the estimated edge to have no component
orthogonal to it, so mirrored estimates satisfy it too.
"""
from dataclasses import dataclass

import numpy as np

from networks.exceptions import CollocatedEstimates

from .geometry import projector


@dataclass(frozen=True)
class ConstraintResiduals:
    edges: dict[tuple[str, str], float]
    anchors: dict[str, float]

    def max(self):
        values = list(self.edges.values()) + list(self.anchors.values())
        return max(values, default=0.0)

    def is_satisfied(self, tol=1e-9):
        return self.max() <= tol

    def edges_satisfied(self, tol=1e-9):
        return max(self.edges.values(), default=0.0) <= tol


def _estimate_matrix(spec, estimate):
    vector = getattr(estimate, "vector", estimate)
    return np.asarray(vector, dtype=float).reshape(spec.n, spec.dimension)


def _anchor_residuals(spec, index_map, points):
    return {
        node_id: float(
            np.linalg.norm(points[index_map.index_of(node_id)] - spec.position_of(node_id))
        )
        for node_id in index_map.anchor_ids
    }


def nonlinear_residual(spec, estimate):
    """|(p_j - p_i)/|p_j - p_i| - g_ij| per edge and |p_i - p_i*| per anchor."""
    index_map = spec.require_index_map()
    points = _estimate_matrix(spec, estimate)
    tol = spec.position_tolerance()
    edges = {}
    for tail, head in spec.undirected_edges():
        tail_id, head_id = index_map.id_of(tail), index_map.id_of(head)
        edge = points[head] - points[tail]
        length = np.linalg.norm(edge)
        if length <= tol:
            raise CollocatedEstimates(
                f"estimates of {tail_id!r} and {head_id!r} coincide"
            )
        g = spec.bearing(tail_id, head_id)
        edges[(tail_id, head_id)] = float(np.linalg.norm(edge / length - g))
    return ConstraintResiduals(edges, _anchor_residuals(spec, index_map, points))


def linear_residual(spec, estimate):
    """|P_g_ij (p_j - p_i)| per edge and |p_i - p_i*| per anchor."""
    index_map = spec.require_index_map()
    points = _estimate_matrix(spec, estimate)
    edges = {}
    for tail, head in spec.undirected_edges():
        tail_id, head_id = index_map.id_of(tail), index_map.id_of(head)
        P = projector(spec.bearing(tail_id, head_id))
        edges[(tail_id, head_id)] = float(
            np.linalg.norm(P @ (points[head] - points[tail]))
        )
    return ConstraintResiduals(edges, _anchor_residuals(spec, index_map, points))
