import logging

from localizability.report import classify
from networks.exceptions import SingularSystem
from rigidity.matrices import bearing_laplacian

from .bounds import evaluate_scenario
from .scenario import build_scenario

logger = logging.getLogger(__name__)


def sweep(spec, max_angles=(), trials=1, seed=0, angles=None, loc_tol=None):
    """Evaluate ``trials`` seeded scenarios per angle scale (or per angle file).

    Trial ``t`` uses seed ``seed + t`` at every scale, so rows sharing a
    trial index differ only in the magnitude of the perturbation.
    """
    report = classify(spec, loc_tol=loc_tol)
    if not report.is_localizable:
        raise SingularSystem(
            f"base network is {report.verdict.value}; sensitivity needs a localizable one"
        )
    laplacian = bearing_laplacian(spec)
    positions = spec.stacked_positions()

    settings_rows = [(None, angles)] if angles is not None else [(a, None) for a in max_angles]
    rows = []
    for max_angle, fixed in settings_rows:
        for trial in range(trials):
            scenario = build_scenario(
                spec,
                angles=fixed,
                max_angle=max_angle,
                seed=seed + trial,
                laplacian=laplacian,
            )
            result = evaluate_scenario(scenario, laplacian, positions, loc_tol)
            rows.append({"trial": trial, **result.to_dict()})

    violations = {
        "delta_ff": sum(not row["delta_ff_within_epsilon"] for row in rows),
        "delta_fa": sum(not row["delta_fa_within_half_epsilon"] for row in rows),
        "stability": sum(
            row["sufficient_condition_met"] and not row["actually_stable"] for row in rows
        ),
        "error_bound": sum(row["bound_holds"] is False for row in rows),
    }
    if any(violations.values()):
        logger.warning("sensitivity guarantees violated: %s", violations)
    return {
        "lambda_min": report.lambda_min_Bff,
        "rows": rows,
        "violations": violations,
    }
