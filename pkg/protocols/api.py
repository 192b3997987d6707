from ninja import Router

from networks.api import ERROR_CODES, error_response
from networks.exceptions import BearingNetworkError
from networks.io import spec_from_schema
from networks.schemas import ErrorDetail

from .flow import FlowConfig
from .runs import simulate_network, solve_network
from .schemas import SimulateIn, SimulateOut, SolveIn, SolveOut

router = Router(tags=["Protocols"])


# 응답은 snake_case dict 그대로, 스키마 alias 로 camelCase 변환
@router.post("/solve", response={200: SolveOut, ERROR_CODES: ErrorDetail})
def solve(request, payload: SolveIn):
    try:
        spec = spec_from_schema(payload.network)
        result = solve_network(spec, payload.locTol)
    except BearingNetworkError as exc:
        return error_response(exc)
    return result


@router.post("/simulate", response={200: SimulateOut, ERROR_CODES: ErrorDetail})
def simulate(request, payload: SimulateIn):
    try:
        config = FlowConfig.from_settings(
            step_size=payload.stepSize,
            max_steps=payload.maxSteps,
            convergence_tol=payload.convergenceTol,
            record_every=payload.recordEvery,
        )
    except ValueError as exc:
        return 400, ErrorDetail(detail=str(exc))
    try:
        spec = spec_from_schema(payload.network)
        trajectory, summary = simulate_network(
            spec,
            config,
            seed=payload.seed,
            max_angle=payload.maxAngle,
            nodewise=payload.nodewise,
        )
    except BearingNetworkError as exc:
        return error_response(exc)
    # 추정치 자체는 finalEstimate 에만 싣고 기록에는 노름만
    summary["records"] = [
        {
            "step": record.step,
            "time": record.time,
            "velocityInfNorm": record.velocity_inf_norm,
            "errorNorm": record.error_norm,
        }
        for record in trajectory.records
    ]
    return summary
