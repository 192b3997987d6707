"""Reading network descriptions (JSON) into validated ``NetworkSpec`` values."""
import hashlib
import json
import logging
from pathlib import Path

from pydantic import ValidationError

from .exceptions import MalformedNetwork
from .schemas import EdgeIn, NetworkIn
from .spec import NetworkSpec, Node, symmetrize, validate

logger = logging.getLogger(__name__)


def canonical_json(payload):
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def network_digest(payload):
    """sha256 of the canonical JSON form of a network description."""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def _edge(entry):
    if isinstance(entry, EdgeIn):
        return entry.tail, entry.head, entry.bearing
    if len(entry) != 2:
        raise MalformedNetwork(f"edge {entry!r} must name exactly two nodes")
    return entry[0], entry[1], None


def spec_from_schema(network: NetworkIn):
    """Build, symmetrize and validate a spec from a parsed description."""
    nodes = tuple(
        Node(
            id=node.id,
            position=None if node.position is None else tuple(node.position),
            is_anchor=node.anchor,
        )
        for node in network.nodes
    )
    edges, bearings = set(), {}
    for entry in network.edges:
        tail, head, bearing = _edge(entry)
        edges.add((tail, head))
        if bearing is not None:
            bearings[(tail, head)] = tuple(bearing)
    spec = NetworkSpec(
        dimension=network.dimension,
        nodes=nodes,
        edges=frozenset(edges),
        bearings=bearings,
    )
    return validate(symmetrize(spec))


def parse_network(payload):
    """Validate a decoded JSON object; malformed structure raises MalformedNetwork."""
    try:
        network = NetworkIn.model_validate(payload)
    except ValidationError as exc:
        raise MalformedNetwork(f"network description is malformed: {exc}") from exc
    return spec_from_schema(network)


def load_network(path):
    """Read a network file; returns ``(spec, payload, digest)``."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise MalformedNetwork(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedNetwork(f"{path} is not valid JSON: {exc}") from exc
    spec = parse_network(payload)
    digest = network_digest(payload)
    logger.debug("loaded %s (%d nodes, digest %s)", path, spec.n, digest[:12])
    return spec, payload, digest


def spec_to_payload(spec):
    """Inverse of ``parse_network`` for specs built in code (fixtures)."""
    edges = sorted({tuple(sorted(edge)) for edge in spec.edges})
    payload_edges = []
    for a, b in edges:
        recorded = spec.recorded_bearing(a, b)
        if recorded is None:
            payload_edges.append([a, b])
        else:
            payload_edges.append({"tail": a, "head": b, "bearing": recorded.tolist()})
    return {
        "dimension": spec.dimension,
        "nodes": [
            {
                "id": node.id,
                "position": None if node.position is None else list(node.position),
                "anchor": node.is_anchor,
            }
            for node in spec.nodes
        ],
        "edges": payload_edges,
    }


def load_angles(path):
    """Per-edge perturbation angles: ``[{"tail", "head", "angle"}, ...]``."""
    path = Path(path)
    try:
        rows = json.loads(path.read_text(encoding="utf-8"))
        return {(str(row["tail"]), str(row["head"])): float(row["angle"]) for row in rows}
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedNetwork(f"cannot read angles from {path}: {exc}") from exc
