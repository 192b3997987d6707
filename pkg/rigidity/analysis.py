import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from django.conf import settings

from networks.exceptions import RankDisagreement

from .matrices import bearing_laplacian, projected_incidence, rigidity_matrix
from .spectral import singular_rank, spectral_summary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RigidityEvidence:
    is_ibr: bool
    rank_laplacian: int
    rank_rigidity_matrix: int
    required_rank: int
    nullity: int
    # "R_B" when positions are known, "R~" (unscaled factor) otherwise
    rigidity_source: str


def rigidity_rank(spec, laplacian, summary, rank_tol: Optional[float] = None):
    """Rank of the rigidity matrix, on the same threshold as rank(B).

    With a tolerance override (argument or ``BEARING_RANK_TOL``) the factor
    R~ is used: its squared singular values are the eigenvalues of B, so the
    matching threshold is ``sqrt(summary.tolerance)``.
    Returns ``(source, matrix, rank, tolerance)``.
    """
    if rank_tol is None:
        rank_tol = settings.BEARING_RANK_TOL
    if rank_tol is None and spec.has_positions:
        R = rigidity_matrix(spec).matrix
        rank, tol = singular_rank(R)
        return "R_B", R, rank, tol
    R = projected_incidence(laplacian)
    if rank_tol is None:
        rank, tol = singular_rank(R)
    else:
        rank, tol = singular_rank(R, float(np.sqrt(summary.tolerance)))
    return "R~", R, rank, tol


def is_ibr(spec, rank_tol: Optional[float] = None, laplacian=None):
    """Infinitesimal bearing rigidity: rank(B) == dn - d - 1.

    The rank is taken both from B and from the rigidity matrix; when the two
    disagree the tolerance cannot be trusted and RankDisagreement is raised.
    """
    if laplacian is None:
        laplacian = bearing_laplacian(spec)
    d = spec.dimension
    n = laplacian.index_map.n
    summary = spectral_summary(laplacian.matrix, rank_tol)
    source, _, rank_R, _ = rigidity_rank(spec, laplacian, summary, rank_tol)
    if rank_R != summary.rank:
        raise RankDisagreement(summary.rank, rank_R)

    required = d * n - d - 1
    logger.debug("rank(B)=%d required=%d", summary.rank, required)
    return RigidityEvidence(
        is_ibr=summary.rank == required,
        rank_laplacian=summary.rank,
        rank_rigidity_matrix=rank_R,
        required_rank=required,
        nullity=summary.nullity,
        rigidity_source=source,
    )


def trivial_motion_space(spec):
    """Orthonormal basis of span{1 kron I_d, p}: d translations and one scaling."""
    d = spec.dimension
    points = spec.positions()
    n = points.shape[0]
    translations = np.kron(np.ones((n, 1)), np.eye(d))
    scaling = (points - points.mean(axis=0)).reshape(-1, 1)
    Q, _ = scipy.linalg.qr(np.hstack([translations, scaling]), mode="economic")
    return Q


def summarize(spec, rank_tol: Optional[float] = None):
    """Spectral summary of B and the rigidity matrix as a plain dict."""
    laplacian = bearing_laplacian(spec)
    summary = spectral_summary(laplacian.matrix, rank_tol)
    evidence = is_ibr(spec, rank_tol, laplacian)
    source, R, rank_R, tol_R = rigidity_rank(spec, laplacian, summary, rank_tol)
    return {
        "dimension": spec.dimension,
        "n_nodes": laplacian.index_map.n,
        "n_edges": len(laplacian.edges),
        "node_order": list(laplacian.index_map.ids),
        "laplacian": {
            "eigenvalues": summary.eigenvalues.tolist(),
            "rank": summary.rank,
            "nullity": summary.nullity,
            "tolerance": summary.tolerance,
        },
        "rigidity_matrix": {
            "source": source,
            "singular_values": scipy.linalg.svdvals(R).tolist() if R.size else [],
            "rank": rank_R,
            "tolerance": tol_R,
        },
        "required_rank": evidence.required_rank,
        "is_ibr": evidence.is_ibr,
    }
