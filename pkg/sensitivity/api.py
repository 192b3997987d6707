from ninja import Router

from networks.api import ERROR_CODES, error_response
from networks.exceptions import BearingNetworkError
from networks.io import spec_from_schema
from networks.schemas import ErrorDetail

from .runs import sweep
from .schemas import PerturbIn, PerturbOut

router = Router(tags=["Sensitivity"])


@router.post("/perturb", response={200: PerturbOut, ERROR_CODES: ErrorDetail})
def perturb(request, payload: PerturbIn):
    try:
        spec = spec_from_schema(payload.network)
        result = sweep(
            spec,
            max_angles=payload.maxAngles,
            trials=payload.trials,
            seed=payload.seed,
            loc_tol=payload.locTol,
        )
    except BearingNetworkError as exc:
        return error_response(exc)
    # bound 는 숫자 또는 "inapplicable"
    return result
