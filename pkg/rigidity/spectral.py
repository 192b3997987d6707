import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from django.conf import settings

from networks.exceptions import AsymmetricInput

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray  # ascending
    rank: int
    null_basis: np.ndarray  # orthonormal columns
    tolerance: float

    @property
    def order(self):
        return self.eigenvalues.size

    @property
    def nullity(self):
        return self.order - self.rank

    @property
    def lambda_max(self):
        return float(self.eigenvalues[-1]) if self.order else 0.0


def default_rank_tolerance(order, lambda_max):
    return order * np.finfo(float).eps * max(lambda_max, 0.0)


def spectral_summary(M, rank_tol: Optional[float] = None):
    """Eigen-decompose a symmetric PSD matrix and split range from null space.

    The rank counts eigenvalues strictly above ``rank_tol``; by default
    ``order * 2**-52 * lambda_max`` unless ``BEARING_RANK_TOL`` is set.
    Overrides below that rounding floor are raised to it.
    """
    M = np.asarray(M, dtype=float)
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    if M.shape[0] != M.shape[1] or np.abs(M - M.T).max(initial=0.0) > SYMMETRY_TOL * scale:
        raise AsymmetricInput("spectral summary needs a symmetric matrix")
    order = M.shape[0]
    if order == 0:
        return SpectralSummary(np.zeros(0), 0, np.zeros((0, 0)), 0.0)
    eigenvalues, eigenvectors = scipy.linalg.eigh((M + M.T) / 2.0)
    if rank_tol is None:
        rank_tol = settings.BEARING_RANK_TOL
    floor = default_rank_tolerance(order, eigenvalues[-1])
    if rank_tol is None:
        rank_tol = floor
    elif rank_tol < floor:
        logger.warning(
            "rank tolerance %.3e is below the rounding floor %.3e", rank_tol, floor
        )
        rank_tol = floor
    positive = eigenvalues > rank_tol
    return SpectralSummary(
        eigenvalues=eigenvalues,
        rank=int(positive.sum()),
        null_basis=eigenvectors[:, ~positive],
        tolerance=float(rank_tol),
    )


def singular_rank(A, rank_tol: Optional[float] = None):
    """Numeric rank of a rectangular matrix from its singular values."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.size == 0:
        return 0, 0.0
    s = scipy.linalg.svdvals(A)
    if rank_tol is None:
        rank_tol = max(A.shape) * np.finfo(float).eps * s[0]
    return int((s > rank_tol).sum()), float(rank_tol)
