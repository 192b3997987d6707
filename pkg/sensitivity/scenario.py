"""Measured-bearing scenarios and the perturbed follower blocks they induce."""
import logging
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
import scipy.linalg

from bearings.geometry import angle_between, perturb_bearing, projector
from networks.exceptions import InvalidAngle
from rigidity.matrices import bearing_laplacian

logger = logging.getLogger(__name__)


def check_angle(theta, what):
    if not 0.0 <= theta <= np.pi:
        raise InvalidAngle(f"{what} must lie in [0, pi], got {theta!r}")
    return theta


def projector_distance(x, y):
    """Spectral norm |P_x - P_y|; equals the sine of the angle between x and y."""
    return float(scipy.linalg.svdvals(projector(x) - projector(y))[0])


@dataclass(frozen=True)
class PerturbationScenario:
    measured: Mapping[tuple[str, str], np.ndarray]
    angles: Mapping[tuple[str, str], float]
    epsilon: float
    ff: np.ndarray
    fa: np.ndarray
    delta_ff: np.ndarray
    delta_fa: np.ndarray
    dimension: int
    n_anchors: int
    seed: Optional[int] = None
    max_angle: Optional[float] = None
    # follower index -> [(neighbor index, measured projector)], for the node-wise flow
    table: dict = field(default_factory=dict, repr=False)

    @property
    def max_theta(self):
        return max(self.angles.values(), default=0.0)

    def to_dict(self):
        return {
            "seed": self.seed,
            "max_angle": self.max_angle,
            "epsilon": self.epsilon,
            "angles": [
                {"tail": tail, "head": head, "theta": theta}
                for (tail, head), theta in self.angles.items()
            ],
        }


def build_scenario(
    spec,
    angles: Optional[Mapping[tuple[str, str], float]] = None,
    max_angle: Optional[float] = None,
    seed: Optional[int] = None,
    laplacian=None,
):
    """Perturb every bearing measured by a follower and rebuild B_ff, B_fa.

    Angles come from ``angles`` (keyed by external (tail, head); missing edges
    are exact) or are drawn uniformly from [0, max_angle]. g~_ij and g~_ji are
    drawn independently, so the perturbed B_ff is generally not symmetric.
    """
    if laplacian is None:
        laplacian = bearing_laplacian(spec)
    if angles is None and max_angle is None:
        max_angle = 0.0
    if max_angle is not None:
        check_angle(float(max_angle), "max_angle")
    if angles is not None:
        for key, theta in angles.items():
            check_angle(float(theta), f"angle of edge {key}")
    index_map = laplacian.index_map
    d = laplacian.dimension
    n_a = laplacian.n_anchors
    n_f = laplacian.n_followers
    rng = np.random.default_rng(seed)

    ff = np.zeros((d * n_f, d * n_f))
    fa = np.zeros((d * n_f, d * n_a))
    measured, realized, table = {}, {}, {}
    for i, neighbors in laplacian.neighbor_projectors().items():
        row = slice(d * (i - n_a), d * (i - n_a + 1))
        table[i] = []
        for j, _ in sorted(neighbors, key=lambda pair: pair[0]):
            key = (index_map.id_of(i), index_map.id_of(j))
            if angles is not None:
                theta = float(angles.get(key, 0.0))
            else:
                theta = float(rng.uniform(0.0, max_angle))
            g = spec.bearing(*key)
            g_tilde = g if theta == 0.0 else perturb_bearing(g, theta, rng)
            P = projector(g_tilde)
            measured[key] = g_tilde
            realized[key] = 0.0 if theta == 0.0 else angle_between(g, g_tilde)
            table[i].append((j, P))

            ff[row, row] += P
            if j < n_a:
                fa[row, d * j : d * (j + 1)] -= P
            else:
                ff[row, d * (j - n_a) : d * (j - n_a + 1)] -= P

    epsilon = 2.0 * float(sum(np.sin(theta) for theta in realized.values()))
    logger.debug("built scenario seed=%s epsilon=%.4e", seed, epsilon)
    return PerturbationScenario(
        measured=measured,
        angles=realized,
        epsilon=epsilon,
        ff=ff,
        fa=fa,
        delta_ff=ff - laplacian.ff,
        delta_fa=fa - laplacian.fa,
        dimension=d,
        n_anchors=n_a,
        seed=seed,
        max_angle=max_angle,
        table=table,
    )
