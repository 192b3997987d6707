"""Bearings, orthogonal projectors and angular discrepancies."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from networks.exceptions import CollocatedNodes, NotUnit, ZeroVector

UNIT_TOL = 1e-6
DEFAULT_POSITION_TOL = 1e-12

# below this |cos| arccos is well conditioned
_ARCCOS_SAFE = 0.9


@dataclass(frozen=True)
class Bearing:
    direction: np.ndarray
    tail: Optional[str] = None
    head: Optional[str] = None

    def reversed(self):
        return Bearing(-self.direction, tail=self.head, head=self.tail)


def bearing(p_i, p_j, *, tail=None, head=None, tol=None):
    """Unit vector pointing from ``p_i`` toward ``p_j``."""
    p_i = np.asarray(p_i, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    if tol is None:
        scale = max(np.abs(p_i).max(initial=0.0), np.abs(p_j).max(initial=0.0))
        tol = DEFAULT_POSITION_TOL * (1.0 + scale)
    edge = p_j - p_i
    length = np.linalg.norm(edge)
    if length <= tol:
        raise CollocatedNodes(f"nodes {tail!r} and {head!r} are collocated")
    return Bearing(edge / length, tail=tail, head=head)


def projector(x, tol=DEFAULT_POSITION_TOL):
    """P_x = I - x x^T / |x|^2, the projector onto the complement of x."""
    x = np.asarray(x, dtype=float).reshape(-1)
    norm = np.linalg.norm(x)
    if norm <= tol:
        raise ZeroVector("cannot project against a zero vector")
    u = x / norm
    return np.eye(x.size) - np.outer(u, u)


def _require_unit(g, name):
    norm = np.linalg.norm(g)
    if abs(norm - 1.0) > UNIT_TOL:
        raise NotUnit(f"{name} has norm {norm:.3e}, expected 1")


def angle_between(g, g_tilde):
    """Angle in [0, pi] between two unit vectors."""
    g = np.asarray(g, dtype=float).reshape(-1)
    g_tilde = np.asarray(g_tilde, dtype=float).reshape(-1)
    _require_unit(g, "g")
    _require_unit(g_tilde, "g_tilde")
    cosine = float(np.clip(g @ g_tilde, -1.0, 1.0))
    if abs(cosine) < _ARCCOS_SAFE:
        return float(np.arccos(cosine))
    return float(
        2.0 * np.arctan2(np.linalg.norm(g - g_tilde), np.linalg.norm(g + g_tilde))
    )


def random_orthogonal_unit(g, rng):
    """Seeded random unit vector orthogonal to the unit vector ``g``."""
    g = np.asarray(g, dtype=float).reshape(-1)
    while True:
        v = rng.standard_normal(g.size)
        v -= (v @ g) * g
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            v /= norm
            # second pass keeps orthogonality at rounding level
            v -= (v @ g) * g
            return v / np.linalg.norm(v)


def perturb_bearing(g, theta, rng_seed=None):
    """Rotate ``g`` by exactly ``theta`` toward a random orthogonal direction.

    ``rng_seed`` is an int seed or a ``numpy.random.Generator`` so that a
    batch of perturbations can share one stream.
    """
    if not 0.0 <= theta <= np.pi:
        raise ValueError(f"theta={theta} outside [0, pi]")
    g = np.asarray(g, dtype=float).reshape(-1)
    _require_unit(g, "g")
    g = g / np.linalg.norm(g)
    if theta == 0.0:
        return g.copy()
    rng = (
        rng_seed
        if isinstance(rng_seed, np.random.Generator)
        else np.random.default_rng(rng_seed)
    )
    u = random_orthogonal_unit(g, rng)
    g_tilde = np.cos(theta) * g + np.sin(theta) * u
    return g_tilde / np.linalg.norm(g_tilde)
