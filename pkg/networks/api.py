import logging
from typing import List

from django.shortcuts import get_object_or_404
from ninja import Router
from ninja.responses import codes_4xx

from .exceptions import (
    BearingNetworkError,
    MalformedNetwork,
    MissingPositions,
    NetworkValidationError,
    SingularPerturbedSystem,
    SingularSystem,
    TooFewAnchors,
)
from .io import network_digest, spec_from_schema
from .models import SavedNetwork
from .schemas import (
    ErrorDetail,
    NetworkDetailOut,
    NetworkIn,
    NetworkOut,
    SavedNetworkIn,
    ValidationOut,
)

logger = logging.getLogger(__name__)

router = Router(tags=["Networks"])

# ninja 의 codes_4xx 에는 422 가 없음
ERROR_CODES = codes_4xx | {422}

_CONFLICTS = (SingularSystem, SingularPerturbedSystem, TooFewAnchors, MissingPositions)


def error_response(exc: BearingNetworkError):
    """Map a domain error to ``(status, ErrorDetail)``."""
    if isinstance(exc, (NetworkValidationError, MalformedNetwork)):
        status = 422
    elif isinstance(exc, _CONFLICTS):
        status = 409
    else:
        status = 400
    issues = [
        {"code": issue.code, "message": issue.message}
        for issue in getattr(exc, "issues", ())
    ]
    return status, ErrorDetail(detail=str(exc), code=exc.code, issues=issues)


def payload_of(network: NetworkIn):
    return network.model_dump(mode="json")


# 네트워크 저장 (검증을 통과한 것만)
@router.post("/", response={201: NetworkOut, ERROR_CODES: ErrorDetail})
def create_network(request, payload: SavedNetworkIn):
    try:
        spec_from_schema(payload.network)
    except BearingNetworkError as exc:
        return error_response(exc)
    body = payload_of(payload.network)
    network = SavedNetwork.objects.create(
        name=payload.name,
        dimension=payload.network.dimension,
        payload=body,
        digest=network_digest(body),
    )
    logger.info("saved network %s (%s)", network.id, network.name)
    return 201, network


@router.get("/", response=List[NetworkOut])
def list_networks(request):
    return SavedNetwork.objects.all()


# 저장 없이 검증만, /{network_id} 보다 먼저 등록해야 함
@router.post("/validate", response={200: ValidationOut, ERROR_CODES: ErrorDetail})
def validate_network(request, payload: NetworkIn):
    try:
        spec = spec_from_schema(payload)
    except BearingNetworkError as exc:
        return error_response(exc)
    return ValidationOut(
        valid=True,
        digest=network_digest(payload_of(payload)),
        anchors=list(spec.anchor_ids),
        followers=list(spec.follower_ids),
        edges=[list(edge) for edge in sorted({tuple(sorted(e)) for e in spec.edges})],
    )


@router.get("/{int:network_id}", response=NetworkDetailOut)
def get_network(request, network_id: int):
    return get_object_or_404(SavedNetwork, id=network_id)


@router.delete("/{int:network_id}", response={204: None})
def delete_network(request, network_id: int):
    network = get_object_or_404(SavedNetwork, id=network_id)
    network.delete()
    return 204, None
