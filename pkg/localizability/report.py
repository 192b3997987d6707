import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from django.conf import settings
from django.db import models

from networks.exceptions import InternalInconsistency
from rigidity.analysis import is_ibr
from rigidity.matrices import bearing_laplacian
from rigidity.spectral import spectral_summary

from .conditions import (
    anchor_lower_bound,
    check_algebraic,
    check_augmented_ibr,
    check_rigidity,
)

logger = logging.getLogger(__name__)


class Verdict(models.TextChoices):
    LOCALIZABLE = "Localizable"
    NOT_LOCALIZABLE = "NotLocalizable"
    NEAR_SINGULAR = "NearSingular"


@dataclass(frozen=True)
class LocalizabilityReport:
    verdict: Verdict
    lambda_min_Bff: float
    lambda_max_Bff: float
    rank_B: int
    nullity_B: int
    anchor_lower_bound: float
    n_anchors: int
    dimension: int
    ibr_G: bool
    ibr_augmented: Optional[bool]
    equivalence_applies: bool
    algebraic_localizable: bool
    rigidity_localizable: bool
    condition_agreement: bool
    sigma_min_anchor_block: float
    tolerances: dict
    index_map: object = field(repr=False)
    follower_motion_witness: Optional[np.ndarray] = field(default=None, repr=False)
    reasons: tuple[str, ...] = ()

    @property
    def is_localizable(self):
        return self.verdict == Verdict.LOCALIZABLE

    def witness_by_node(self):
        if self.follower_motion_witness is None:
            return None
        d = self.dimension
        return {
            node_id: self.follower_motion_witness[d * i : d * (i + 1)].tolist()
            for i, node_id in enumerate(self.index_map.ids)
        }

    def to_dict(self):
        return {
            "verdict": str(self.verdict.value),
            "lambda_min_Bff": self.lambda_min_Bff,
            "lambda_max_Bff": self.lambda_max_Bff,
            "rank_B": self.rank_B,
            "nullity_B": self.nullity_B,
            "anchor_lower_bound": self.anchor_lower_bound,
            "n_anchors": self.n_anchors,
            "dimension": self.dimension,
            "ibr_G": self.ibr_G,
            "ibr_augmented": self.ibr_augmented,
            "equivalence_applies": self.equivalence_applies,
            "algebraic_localizable": self.algebraic_localizable,
            "rigidity_localizable": self.rigidity_localizable,
            "condition_agreement": self.condition_agreement,
            "sigma_min_anchor_block": (
                self.sigma_min_anchor_block
                if np.isfinite(self.sigma_min_anchor_block)
                else None
            ),
            "follower_motion_witness": self.witness_by_node(),
            "reasons": list(self.reasons),
            "tolerances": dict(self.tolerances),
        }


def _verdict(lambda_min, loc_tol, factor):
    if lambda_min > factor * loc_tol:
        return Verdict.LOCALIZABLE
    if lambda_min > loc_tol:
        return Verdict.NEAR_SINGULAR
    return Verdict.NOT_LOCALIZABLE


def _reasons(verdict, spec, lower_bound, ibr, augmented, rigidity):
    reasons = []
    if spec.n_anchors < 2:
        reasons.append("fewer than two anchors")
    if spec.n_anchors < lower_bound:
        reasons.append(
            f"anchor count {spec.n_anchors} below nullity(B)/d bound {lower_bound:g}"
        )
    if verdict == Verdict.NOT_LOCALIZABLE and rigidity.witness is not None:
        reasons.append("a bearing motion moves followers while every anchor stays put")
    if verdict == Verdict.NEAR_SINGULAR:
        reasons.append("lambda_min(B_ff) lies in the near-singular band")
    if ibr and spec.n_anchors >= 2:
        reasons.append("network is infinitesimally bearing rigid with two or more anchors")
    elif augmented is not None and augmented.ibr_augmented:
        reasons.append("network with all anchors connected is infinitesimally bearing rigid")
    return tuple(reasons)


def classify(
    spec,
    rank_tol: Optional[float] = None,
    loc_tol: Optional[float] = None,
    near_singular_factor: Optional[float] = None,
    anchor_tol: Optional[float] = None,
):
    """Run every applicable localizability condition and cross-check them.

    Disagreement between conditions is tolerated only inside the
    near-singular band; anywhere else it raises InternalInconsistency.
    """
    if near_singular_factor is None:
        near_singular_factor = settings.BEARING_NEAR_SINGULAR_FACTOR
    laplacian = bearing_laplacian(spec)
    summary = spectral_summary(laplacian.matrix, rank_tol)
    algebraic = check_algebraic(laplacian, loc_tol)
    rigidity = check_rigidity(laplacian, summary, anchor_tol=anchor_tol)
    lower_bound = anchor_lower_bound(laplacian, summary)
    ibr = is_ibr(spec, rank_tol, laplacian)
    augmented = (
        check_augmented_ibr(spec, rank_tol) if spec.n_anchors >= 2 else None
    )

    verdict = _verdict(algebraic.lambda_min, algebraic.tolerance, near_singular_factor)
    agreement = algebraic.localizable == rigidity.localizable
    if augmented is not None and augmented.equivalence_applies:
        agreement = agreement and augmented.ibr_augmented == algebraic.localizable
    if not agreement and verdict != Verdict.NEAR_SINGULAR:
        raise InternalInconsistency(
            f"localizability conditions disagree outside the near-singular band "
            f"(algebraic={algebraic.localizable}, rigidity={rigidity.localizable}, "
            f"augmented={augmented.ibr_augmented if augmented else None}, "
            f"lambda_min={algebraic.lambda_min:.3e})"
        )

    witness = rigidity.witness if verdict == Verdict.NOT_LOCALIZABLE else None
    if verdict == Verdict.NOT_LOCALIZABLE and witness is None:
        raise InternalInconsistency("B_ff is singular but no follower-only motion was found")

    report = LocalizabilityReport(
        verdict=verdict,
        lambda_min_Bff=algebraic.lambda_min,
        lambda_max_Bff=algebraic.lambda_max,
        rank_B=summary.rank,
        nullity_B=summary.nullity,
        anchor_lower_bound=lower_bound,
        n_anchors=spec.n_anchors,
        dimension=spec.dimension,
        ibr_G=ibr.is_ibr,
        ibr_augmented=augmented.ibr_augmented if augmented else None,
        equivalence_applies=bool(augmented and augmented.equivalence_applies),
        algebraic_localizable=algebraic.localizable,
        rigidity_localizable=rigidity.localizable,
        condition_agreement=agreement,
        sigma_min_anchor_block=rigidity.sigma_min_anchor_block,
        tolerances={
            "rank": summary.tolerance,
            "loc": algebraic.tolerance,
            "near_singular_factor": float(near_singular_factor),
            "anchor_block": rigidity.tolerance,
        },
        index_map=laplacian.index_map,
        follower_motion_witness=witness,
        reasons=_reasons(verdict, spec, lower_bound, ibr.is_ibr, augmented, rigidity),
    )
    log = logger.warning if verdict == Verdict.NEAR_SINGULAR else logger.info
    log("classified network: %s (lambda_min=%.3e)", verdict.value, algebraic.lambda_min)
    return report
