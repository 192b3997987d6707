from typing import List, Optional

from ninja import Schema

from networks.schemas import NetworkIn


class RigidityQuery(Schema):
    network: NetworkIn
    rankTol: Optional[float] = None


class SpectrumOut(Schema):
    eigenvalues: List[float]
    rank: int
    nullity: int
    tolerance: float


class RigidityMatrixOut(Schema):
    source: str
    singularValues: List[float]
    rank: int
    tolerance: float


class RigiditySummaryOut(Schema):
    dimension: int
    nNodes: int
    nEdges: int
    nodeOrder: List[str]
    laplacian: SpectrumOut
    rigidityMatrix: RigidityMatrixOut
    requiredRank: int
    isIbr: bool
