import math
from typing import Annotated, Dict, List, Optional, Union

from ninja import Field, Schema

from networks.schemas import NetworkIn


class PerturbIn(Schema):
    network: NetworkIn
    maxAngles: List[Annotated[float, Field(ge=0.0, le=math.pi)]] = [0.1]
    trials: int = Field(1, ge=1)
    seed: int = 0
    locTol: Optional[float] = None


class EdgeAngleOut(Schema):
    tail: str
    head: str
    theta: float


class ScenarioRowOut(Schema):
    trial: int
    seed: Optional[int] = None
    max_angle: Optional[float] = None
    epsilon: float
    angles: List[EdgeAngleOut]
    lambda_min: float
    margin: float
    delta_ff_norm: float
    delta_fa_norm: float
    delta_ff_within_epsilon: bool
    delta_fa_within_half_epsilon: bool
    sufficient_condition_met: bool
    actually_stable: bool
    min_real_eigenvalue: float
    # a number, or "inapplicable" when epsilon >= lambda_min
    bound: Union[float, str]
    realized_error: Optional[float] = None
    bound_holds: Optional[bool] = None


class PerturbOut(Schema):
    lambda_min: float
    rows: List[ScenarioRowOut]
    violations: Dict[str, int]
