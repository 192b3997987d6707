"""Individual localizability conditions.

Each check works on an assembled ``BearingLaplacian`` (or the spec, for the
augmented-network test) and returns its evidence alongside the boolean so
that reports can show why a verdict was reached.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from django.conf import settings

from networks.exceptions import TooFewAnchors
from networks.spec import augment_anchors
from rigidity.analysis import RigidityEvidence, is_ibr
from rigidity.spectral import spectral_summary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlgebraicCheck:
    localizable: bool
    lambda_min: float
    lambda_max: float
    tolerance: float


@dataclass(frozen=True)
class RigidityCheck:
    localizable: bool
    sigma_min_anchor_block: float
    tolerance: float
    witness: Optional[np.ndarray] = None  # length d*n, internal order


@dataclass(frozen=True)
class AugmentedCheck:
    ibr_augmented: bool
    sufficient_verdict: bool
    equivalence_applies: bool
    evidence: RigidityEvidence


def default_loc_tolerance(order, lambda_max):
    return order * np.finfo(float).eps * max(lambda_max, 0.0)


def check_algebraic(laplacian, loc_tol: Optional[float] = None):
    """Localizable iff B_ff is nonsingular, i.e. lambda_min(B_ff) > tau_loc."""
    eigenvalues = scipy.linalg.eigvalsh(laplacian.ff)
    lambda_min, lambda_max = float(eigenvalues[0]), float(eigenvalues[-1])
    if loc_tol is None:
        loc_tol = settings.BEARING_LOC_TOL
    if loc_tol is None:
        loc_tol = default_loc_tolerance(eigenvalues.size, lambda_max)
    return AlgebraicCheck(
        localizable=lambda_min > loc_tol,
        lambda_min=max(lambda_min, 0.0),
        lambda_max=lambda_max,
        tolerance=float(loc_tol),
    )


def check_rigidity(
    laplacian,
    summary=None,
    rank_tol: Optional[float] = None,
    anchor_tol: Optional[float] = None,
):
    """Localizable iff every infinitesimal bearing motion moves an anchor.

    With N a basis of Null(B) split into anchor rows N_a and follower rows,
    that holds iff N_a has full column rank. Otherwise a null vector x of N_a
    gives the follower-only motion N x, returned normalised as the witness.
    """
    if summary is None:
        summary = spectral_summary(laplacian.matrix, rank_tol)
    if anchor_tol is None:
        anchor_tol = settings.BEARING_ANCHOR_BLOCK_TOL
    N = summary.null_basis
    k = N.shape[1]
    split = laplacian.dimension * laplacian.n_anchors
    if k == 0:
        return RigidityCheck(True, float("inf"), float(anchor_tol))

    N_a = N[:split]
    singular = np.zeros(k)
    if split:
        _, s, vh = scipy.linalg.svd(N_a, full_matrices=True)
        singular[: s.size] = s
    else:
        vh = np.eye(k)
    smallest = int(np.argmin(singular))
    sigma_min = float(singular[smallest])
    if sigma_min > anchor_tol:
        return RigidityCheck(True, sigma_min, float(anchor_tol))

    witness = N @ vh[smallest]
    witness[:split] = 0.0
    witness /= np.linalg.norm(witness[split:])
    logger.debug("follower-only bearing motion found, sigma_min(N_a)=%.3e", sigma_min)
    return RigidityCheck(False, sigma_min, float(anchor_tol), witness)


def anchor_lower_bound(laplacian, summary=None, rank_tol: Optional[float] = None):
    """nullity(B)/d; a localizable network has at least this many anchors."""
    if summary is None:
        summary = spectral_summary(laplacian.matrix, rank_tol)
    return summary.nullity / laplacian.dimension


def check_augmented_ibr(spec, rank_tol: Optional[float] = None):
    """IBR of the network with all anchor pairs connected.

    Sufficient for localizability; with exactly two anchors also necessary.
    """
    if spec.n_anchors < 2:
        raise TooFewAnchors(f"{spec.n_anchors} anchor(s); at least two are needed")
    evidence = is_ibr(augment_anchors(spec), rank_tol)
    return AugmentedCheck(
        ibr_augmented=evidence.is_ibr,
        sufficient_verdict=evidence.is_ibr,
        equivalence_applies=spec.n_anchors == 2,
        evidence=evidence,
    )
