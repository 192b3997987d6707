"""Report envelopes, JSON/CSV writers and matrix dumps."""
import csv
import json
import logging
from importlib.metadata import PackageNotFoundError, version

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

logger = logging.getLogger(__name__)

AXES = "xyz"


class ReportEncoder(DjangoJSONEncoder):
    def default(self, o):
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        return super().default(o)


def _package_version():
    try:
        return version("bearing-network")
    except PackageNotFoundError:
        return "0.1.0"


def envelope(config, digest, body):
    """Wrap a result with what is needed to reproduce it."""
    return {
        "command": config.command,
        "version": _package_version(),
        "input": {"path": str(config.input), "digest": digest},
        "seed": config.seed,
        "tolerances": config.tolerances(),
        "flow": config.flow_dict(),
        **body,
    }


def dumps(data):
    return json.dumps(data, cls=ReportEncoder, indent=2, allow_nan=False)


def write_json(data, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data) + "\n", encoding="utf-8")
    logger.info("wrote %s", path)


def coordinate_columns(index_map, dimension):
    axes = AXES if dimension <= len(AXES) else [f"c{k}" for k in range(dimension)]
    return [f"{node_id}_{axis}" for node_id in index_map.follower_ids for axis in axes]


def write_trajectory_csv(trajectory, index_map, path):
    """step, t, follower coordinates, velocity_inf_norm, error_norm (blank without truth)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["step", "t"]
            + coordinate_columns(index_map, trajectory.dimension)
            + ["velocity_inf_norm", "error_norm"]
        )
        for record in trajectory.records:
            writer.writerow(
                [record.step, repr(record.time)]
                + [repr(float(c)) for c in record.estimate]
                + [
                    repr(record.velocity_inf_norm),
                    "" if record.error_norm is None else repr(record.error_norm),
                ]
            )
    logger.info("wrote %d trajectory rows to %s", len(trajectory.records), path)


def write_matrix_csv(matrix, path):
    """Dense row-major CSV."""
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(matrix), delimiter=",", fmt="%.17g")
