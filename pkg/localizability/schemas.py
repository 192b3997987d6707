from typing import Dict, List, Optional

from ninja import Field, Schema

from networks.schemas import NetworkIn


class LocalizabilityQuery(Schema):
    network: NetworkIn
    rankTol: Optional[float] = None
    locTol: Optional[float] = None


class TolerancesOut(Schema):
    rank: float
    loc: float
    nearSingularFactor: float = Field(alias="near_singular_factor")
    anchorBlock: float = Field(alias="anchor_block")


class LocalizabilityOut(Schema):
    verdict: str
    lambdaMinBff: float = Field(alias="lambda_min_Bff")
    lambdaMaxBff: float = Field(alias="lambda_max_Bff")
    rankB: int = Field(alias="rank_B")
    nullityB: int = Field(alias="nullity_B")
    anchorLowerBound: float = Field(alias="anchor_lower_bound")
    nAnchors: int = Field(alias="n_anchors")
    ibrG: bool = Field(alias="ibr_G")
    ibrAugmented: Optional[bool] = Field(None, alias="ibr_augmented")
    conditionAgreement: bool = Field(alias="condition_agreement")
    followerMotionWitness: Optional[Dict[str, List[float]]] = Field(
        None, alias="follower_motion_witness"
    )
    reasons: List[str]
    tolerances: TolerancesOut
