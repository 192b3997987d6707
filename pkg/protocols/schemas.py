import math
from typing import Dict, List, Optional, Union

from ninja import Field, Schema

from networks.schemas import NetworkIn


class SolveIn(Schema):
    network: NetworkIn
    locTol: Optional[float] = None


class SolveOut(Schema):
    positions: Dict[str, List[float]]
    linearResidual: float = Field(alias="linear_residual")
    nonlinearResidual: Optional[float] = Field(None, alias="nonlinear_residual")
    errorNorm: Optional[float] = Field(None, alias="error_norm")
    relativeError: Optional[float] = Field(None, alias="relative_error")


class SimulateIn(Schema):
    network: NetworkIn
    seed: int = 0
    stepSize: Union[float, str] = "auto"
    maxSteps: Optional[int] = None
    convergenceTol: Optional[float] = None
    recordEvery: Optional[int] = None
    maxAngle: Optional[float] = Field(None, ge=0.0, le=math.pi)
    nodewise: bool = False


class FlowRecordOut(Schema):
    step: int
    time: float
    velocityInfNorm: float
    errorNorm: Optional[float] = None


class SimulateOut(Schema):
    status: str
    converged: bool
    steps: int
    stepSize: float = Field(alias="step_size")
    finalTime: float = Field(alias="final_time")
    finalVelocityInfNorm: float = Field(alias="final_velocity_inf_norm")
    finalError: Optional[float] = Field(None, alias="final_error")
    finalEstimate: Dict[str, List[float]] = Field(alias="final_estimate")
    perturbed: bool
    epsilon: Optional[float] = None
    records: List[FlowRecordOut] = []
