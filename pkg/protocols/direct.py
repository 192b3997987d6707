"""Direct (centralized) solution of the follower positions."""
import logging
import warnings

import numpy as np
import scipy.linalg
from django.conf import settings

from localizability.conditions import check_algebraic
from networks.exceptions import IllConditioned, SingularSystem

logger = logging.getLogger(__name__)


def _solve_ff(laplacian, rhs, loc_tol=None):
    algebraic = check_algebraic(laplacian, loc_tol)
    if not algebraic.localizable:
        raise SingularSystem(
            f"B_ff is singular (lambda_min={algebraic.lambda_min:.3e}, "
            f"tolerance {algebraic.tolerance:.3e})"
        )
    condition = algebraic.lambda_max / algebraic.lambda_min
    if condition > settings.BEARING_ILL_CONDITIONED:
        logger.warning("B_ff condition number %.3e", condition)
        warnings.warn(
            f"B_ff condition number {condition:.3e} exceeds "
            f"{settings.BEARING_ILL_CONDITIONED:.0e}",
            IllConditioned,
            stacklevel=3,
        )
    try:
        factor = scipy.linalg.cho_factor(laplacian.ff, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise SingularSystem("B_ff is not positive definite") from exc
    return scipy.linalg.cho_solve(factor, rhs)


def solve_direct(laplacian, p_a, loc_tol=None):
    """p_f = -B_ff^{-1} B_fa p_a via a Cholesky solve."""
    p_a = np.asarray(p_a, dtype=float).reshape(-1)
    rhs = -laplacian.fa @ p_a
    p_f = _solve_ff(laplacian, rhs, loc_tol)
    logger.debug(
        "direct solve residual %.3e", np.linalg.norm(laplacian.ff @ p_f - rhs)
    )
    return p_f


def anchor_error_propagation(laplacian, delta_p_a, loc_tol=None):
    """Follower error caused by an anchor error: -B_ff^{-1} B_fa dp_a."""
    delta_p_a = np.asarray(delta_p_a, dtype=float).reshape(-1)
    return _solve_ff(laplacian, -laplacian.fa @ delta_p_a, loc_tol)
