from django.shortcuts import get_object_or_404
from ninja import Router

from networks.api import ERROR_CODES, error_response
from networks.exceptions import BearingNetworkError
from networks.io import spec_from_schema
from networks.models import SavedNetwork
from networks.schemas import ErrorDetail

from .report import classify
from .schemas import LocalizabilityOut, LocalizabilityQuery

router = Router(tags=["Localizability"])


@router.post("/check", response={200: LocalizabilityOut, ERROR_CODES: ErrorDetail})
def check_network(request, payload: LocalizabilityQuery):
    try:
        spec = spec_from_schema(payload.network)
        report = classify(spec, rank_tol=payload.rankTol, loc_tol=payload.locTol)
    except BearingNetworkError as exc:
        return error_response(exc)
    return report.to_dict()


# 저장된 네트워크 판정 (기본 허용오차)
@router.get(
    "/networks/{int:network_id}",
    response={200: LocalizabilityOut, ERROR_CODES: ErrorDetail},
)
def check_saved_network(request, network_id: int):
    network = get_object_or_404(SavedNetwork, id=network_id)
    try:
        report = classify(network.to_spec())
    except BearingNetworkError as exc:
        return error_response(exc)
    return report.to_dict()
