"""Bearing rigidity matrix and bearing Laplacian assembly."""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from bearings.geometry import projector
from networks.exceptions import InternalInconsistency
from networks.spec import IndexMap, incidence_matrix

logger = logging.getLogger(__name__)

FACTORIZATION_TOL = 1e-10


@dataclass(frozen=True)
class BearingRigidityMatrix:
    matrix: np.ndarray  # (d*m, d*n)
    edges: tuple[tuple[int, int], ...]
    index_map: IndexMap
    dimension: int


@dataclass(frozen=True)
class BearingLaplacian:
    matrix: np.ndarray  # (d*n, d*n)
    dimension: int
    index_map: IndexMap
    edges: tuple[tuple[int, int], ...]
    projectors: np.ndarray  # (m, d, d), one per oriented edge

    @property
    def n_anchors(self):
        return self.index_map.n_anchors

    @property
    def n_followers(self):
        return self.index_map.n_followers

    @property
    def _split(self):
        return self.dimension * self.n_anchors

    @property
    def aa(self):
        return self.matrix[: self._split, : self._split]

    @property
    def af(self):
        return self.matrix[: self._split, self._split :]

    @property
    def fa(self):
        return self.matrix[self._split :, : self._split]

    @property
    def ff(self):
        return self.matrix[self._split :, self._split :]

    def block(self, i, j):
        d = self.dimension
        return self.matrix[d * i : d * (i + 1), d * j : d * (j + 1)]

    def neighbor_projectors(self):
        """Follower index -> [(neighbor index, P_ij), ...] in internal indices."""
        table = {i: [] for i in range(self.n_anchors, self.index_map.n)}
        for (tail, head), P in zip(self.edges, self.projectors):
            if tail in table:
                table[tail].append((head, P))
            if head in table:
                table[head].append((tail, P))
        return table


def _oriented_edges(spec):
    return tuple(spec.undirected_edges())


def _edge_bearings(spec, edges):
    ids = spec.require_index_map()
    return [spec.bearing(ids.id_of(tail), ids.id_of(head)) for tail, head in edges]


def _expanded_incidence(spec):
    return np.kron(incidence_matrix(spec).astype(float), np.eye(spec.dimension))


def _block_diag(blocks):
    if not blocks:
        return np.zeros((0, 0))
    return scipy.linalg.block_diag(*blocks)


def rigidity_matrix(spec):
    """R_B = diag(P_g_k / |e_k|) (H kron I_d); needs every node position."""
    index_map = spec.require_index_map()
    d = spec.dimension
    points = spec.positions()
    edges = _oriented_edges(spec)
    blocks = []
    for (tail, head), g in zip(edges, _edge_bearings(spec, edges)):
        length = np.linalg.norm(points[head] - points[tail])
        blocks.append(projector(g) / length)
    H_bar = _expanded_incidence(spec)
    if not blocks:
        matrix = np.zeros((0, d * index_map.n))
    else:
        matrix = _block_diag(blocks) @ H_bar
    return BearingRigidityMatrix(matrix, edges, index_map, d)


def projected_incidence(laplacian):
    """R~ = diag(P_g_k) (H kron I_d), the unscaled square-root factor of B."""
    d = laplacian.dimension
    n = laplacian.index_map.n
    if not laplacian.edges:
        return np.zeros((0, d * n))
    H = np.zeros((len(laplacian.edges), n))
    for row, (tail, head) in enumerate(laplacian.edges):
        H[row, tail] = -1.0
        H[row, head] = 1.0
    return _block_diag(list(laplacian.projectors)) @ np.kron(
        H, np.eye(d)
    )


def bearing_laplacian(spec):
    """Assemble B block by block and check it against R~^T R~."""
    index_map = spec.require_index_map()
    d = spec.dimension
    n = index_map.n
    edges = _oriented_edges(spec)
    projectors = np.array(
        [projector(g) for g in _edge_bearings(spec, edges)]
    ).reshape(len(edges), d, d)

    B = np.zeros((d * n, d * n))
    for (i, j), P in zip(edges, projectors):
        si, sj = slice(d * i, d * (i + 1)), slice(d * j, d * (j + 1))
        B[si, si] += P
        B[sj, sj] += P
        B[si, sj] -= P
        B[sj, si] -= P
    B.setflags(write=False)
    projectors.setflags(write=False)

    laplacian = BearingLaplacian(B, d, index_map, edges, projectors)
    R = projected_incidence(laplacian)
    gap = np.abs(B - R.T @ R).max(initial=0.0)
    if gap > FACTORIZATION_TOL * max(1.0, np.abs(B).max(initial=0.0)):
        raise InternalInconsistency(f"B differs from R~^T R~ by {gap:.3e}")
    logger.debug("assembled bearing Laplacian n=%d m=%d d=%d", n, len(edges), d)
    return laplacian


def quadratic_cost(spec, estimate):
    """J(p) = 1/2 sum_i sum_{j in N_i} |P_g_ij (p_i - p_j)|^2, summed edge-wise."""
    index_map = spec.require_index_map()
    vector = getattr(estimate, "vector", estimate)
    points = np.asarray(vector, dtype=float).reshape(index_map.n, spec.dimension)
    total = 0.0
    for tail, head in _oriented_edges(spec):
        P = projector(spec.bearing(index_map.id_of(tail), index_map.id_of(head)))
        diff = P @ (points[tail] - points[head])
        # (i, j) and (j, i) both appear in the double sum
        total += float(diff @ diff)
    return total
