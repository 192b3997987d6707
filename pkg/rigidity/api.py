from ninja import Router

from networks.api import ERROR_CODES, error_response
from networks.exceptions import BearingNetworkError
from networks.io import spec_from_schema
from networks.schemas import ErrorDetail

from .analysis import summarize
from .schemas import RigidityQuery, RigiditySummaryOut

router = Router(tags=["Rigidity"])


# B 와 강성 행렬의 랭크를 함께 돌려줌
@router.post("/summary", response={200: RigiditySummaryOut, ERROR_CODES: ErrorDetail})
def rigidity_summary(request, payload: RigidityQuery):
    try:
        spec = spec_from_schema(payload.network)
        summary = summarize(spec, payload.rankTol)
    except BearingNetworkError as exc:
        return error_response(exc)
    matrix = summary["rigidity_matrix"]
    return RigiditySummaryOut(
        dimension=summary["dimension"],
        nNodes=summary["n_nodes"],
        nEdges=summary["n_edges"],
        nodeOrder=summary["node_order"],
        laplacian=summary["laplacian"],
        rigidityMatrix={
            "source": matrix["source"],
            "singularValues": matrix["singular_values"],
            "rank": matrix["rank"],
            "tolerance": matrix["tolerance"],
        },
        requiredRank=summary["required_rank"],
        isIbr=summary["is_ibr"],
    )
