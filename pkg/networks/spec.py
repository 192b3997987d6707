"""Static description of a bearing sensor network.

Nodes keep the order in which they were described; internally anchors are
moved to the front (``IndexMap``) so that the bearing Laplacian splits into
anchor and follower blocks. Reports always speak in external node ids.
"""
import dataclasses
import itertools
import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional

import numpy as np
from django.conf import settings
from scipy.spatial.distance import pdist, squareform

from bearings.geometry import bearing as bearing_between

from .exceptions import MissingPositions, NetworkValidationError, ValidationIssue

logger = logging.getLogger(__name__)

EdgeKey = tuple[str, str]

UNIT_NORM_TOL = 1e-6
REVERSAL_TOL = 1e-9


@dataclass(frozen=True)
class Node:
    id: str
    position: Optional[tuple[float, ...]]
    is_anchor: bool = False


@dataclass(frozen=True)
class IndexMap:
    """Bijection between external node ids and internal slots (anchors first)."""

    ids: tuple[str, ...]
    n_anchors: int
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", MappingProxyType({k: i for i, k in enumerate(self.ids)})
        )

    @classmethod
    def from_nodes(cls, nodes):
        anchors = [node.id for node in nodes if node.is_anchor]
        followers = [node.id for node in nodes if not node.is_anchor]
        return cls(ids=tuple(anchors + followers), n_anchors=len(anchors))

    @property
    def n(self):
        return len(self.ids)

    @property
    def n_followers(self):
        return self.n - self.n_anchors

    @property
    def anchor_ids(self):
        return self.ids[: self.n_anchors]

    @property
    def follower_ids(self):
        return self.ids[self.n_anchors :]

    def index_of(self, node_id):
        return self._index[node_id]

    def id_of(self, index):
        return self.ids[index]

    def is_anchor(self, index):
        return index < self.n_anchors

    def __contains__(self, node_id):
        return node_id in self._index


@dataclass(frozen=True)
class StackedPosition:
    """Positions stacked as one vector of length d*n in internal order."""

    vector: np.ndarray
    dimension: int
    n_anchors: int

    def __post_init__(self):
        vector = np.array(self.vector, dtype=float).reshape(-1)
        vector.setflags(write=False)
        object.__setattr__(self, "vector", vector)

    @classmethod
    def from_blocks(cls, p_a, p_f, dimension):
        p_a = np.asarray(p_a, dtype=float).reshape(-1)
        p_f = np.asarray(p_f, dtype=float).reshape(-1)
        return cls(np.concatenate([p_a, p_f]), dimension, p_a.size // dimension)

    @property
    def anchors(self):
        return self.vector[: self.dimension * self.n_anchors]

    @property
    def followers(self):
        return self.vector[self.dimension * self.n_anchors :]


@dataclass(frozen=True)
class NetworkSpec:
    dimension: int
    nodes: tuple[Node, ...]
    edges: frozenset[EdgeKey]
    bearings: Mapping[EdgeKey, tuple[float, ...]] = field(default_factory=dict)
    index_map: Optional[IndexMap] = None
    _by_id: Mapping[str, Node] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_by_id", MappingProxyType({node.id: node for node in self.nodes})
        )

    @property
    def n(self):
        return len(self.nodes)

    @property
    def node_ids(self):
        return tuple(node.id for node in self.nodes)

    @property
    def anchor_ids(self):
        return tuple(node.id for node in self.nodes if node.is_anchor)

    @property
    def follower_ids(self):
        return tuple(node.id for node in self.nodes if not node.is_anchor)

    @property
    def n_anchors(self):
        return len(self.anchor_ids)

    @property
    def n_followers(self):
        return self.n - self.n_anchors

    @property
    def has_positions(self):
        return all(node.position is not None for node in self.nodes)

    def node(self, node_id):
        return self._by_id[node_id]

    def require_index_map(self):
        if self.index_map is None:
            return IndexMap.from_nodes(self.nodes)
        return self.index_map

    def position_tolerance(self):
        coords = [abs(c) for node in self.nodes if node.position for c in node.position]
        return settings.BEARING_POSITION_TOL_SCALE * (1.0 + max(coords, default=0.0))

    def position_of(self, node_id):
        position = self.node(node_id).position
        if position is None:
            raise MissingPositions(f"node {node_id!r} has no position")
        return np.asarray(position, dtype=float)

    def positions(self):
        """(n, d) array of node positions in internal order."""
        index_map = self.require_index_map()
        missing = [i for i in index_map.ids if self.node(i).position is None]
        if missing:
            raise MissingPositions(f"nodes without positions: {', '.join(missing)}")
        return np.array([self.node(i).position for i in index_map.ids], dtype=float)

    def stacked_positions(self):
        return StackedPosition(
            self.positions().reshape(-1), self.dimension, self.n_anchors
        )

    def anchor_positions(self):
        """p_a stacked in internal order."""
        index_map = self.require_index_map()
        return np.concatenate(
            [self.position_of(i) for i in index_map.anchor_ids]
        ) if index_map.n_anchors else np.zeros(0)

    def undirected_edges(self):
        """Edges as (tail, head) internal indices with tail < head, sorted."""
        index_map = self.require_index_map()
        pairs = set()
        for a, b in self.edges:
            i, j = index_map.index_of(a), index_map.index_of(b)
            pairs.add((min(i, j), max(i, j)))
        return sorted(pairs)

    def recorded_bearing(self, tail, head):
        if (tail, head) in self.bearings:
            return np.asarray(self.bearings[(tail, head)], dtype=float)
        if (head, tail) in self.bearings:
            return -np.asarray(self.bearings[(head, tail)], dtype=float)
        return None

    def bearing(self, tail, head):
        """Unit bearing g_ij from ``tail`` toward ``head``.

        A bearing recorded in the network description wins over the one
        implied by the positions.
        """
        recorded = self.recorded_bearing(tail, head)
        if recorded is not None:
            return recorded / np.linalg.norm(recorded)
        return bearing_between(
            self.position_of(tail),
            self.position_of(head),
            tail=tail,
            head=head,
            tol=self.position_tolerance(),
        ).direction


def _collocation_issues(spec):
    positioned = [node for node in spec.nodes if node.position is not None]
    if len(positioned) < 2:
        return []
    try:
        points = np.array([node.position for node in positioned], dtype=float)
    except ValueError:
        return []
    if points.ndim != 2:
        return []
    distances = squareform(pdist(points))
    tol = spec.position_tolerance()
    issues = []
    for a, b in itertools.combinations(range(len(positioned)), 2):
        if distances[a, b] <= tol:
            issues.append(
                ValidationIssue(
                    "CollocatedNodes",
                    f"nodes {positioned[a].id!r} and {positioned[b].id!r} coincide",
                )
            )
    return issues


def validate(spec):
    """Return ``spec`` with its ``IndexMap`` attached or raise every violation."""
    issues = []
    d = spec.dimension
    if not isinstance(d, int) or d < 2:
        issues.append(ValidationIssue("DimensionMismatch", f"dimension {d} < 2"))

    seen = set()
    for node in spec.nodes:
        if node.id in seen:
            issues.append(ValidationIssue("DuplicateNode", f"node {node.id!r} repeated"))
        seen.add(node.id)
        if node.position is None:
            if node.is_anchor:
                issues.append(
                    ValidationIssue("MissingPosition", f"anchor {node.id!r} has no position")
                )
        elif len(node.position) != d:
            issues.append(
                ValidationIssue(
                    "DimensionMismatch",
                    f"node {node.id!r} has {len(node.position)} coordinates, expected {d}",
                )
            )

    if not any(not node.is_anchor for node in spec.nodes):
        issues.append(ValidationIssue("NoFollowers", "every node is an anchor"))

    for a, b in sorted(spec.edges):
        for end in (a, b):
            if end not in seen:
                issues.append(
                    ValidationIssue("DanglingEdge", f"edge ({a}, {b}) references unknown {end!r}")
                )
        if a == b:
            issues.append(ValidationIssue("DanglingEdge", f"edge ({a}, {b}) is a self-loop"))

    issues.extend(_bearing_issues(spec, seen))
    if not any(issue.code == "DimensionMismatch" for issue in issues):
        issues.extend(_collocation_issues(spec))

    if issues:
        logger.debug("network rejected: %s", [issue.code for issue in issues])
        raise NetworkValidationError(issues)
    return dataclasses.replace(spec, index_map=IndexMap.from_nodes(spec.nodes))


def _bearing_issues(spec, node_ids):
    issues = []
    d = spec.dimension
    undirected = {frozenset(edge) for edge in spec.edges}
    for (a, b), direction in spec.bearings.items():
        if frozenset((a, b)) not in undirected:
            issues.append(
                ValidationIssue("DanglingEdge", f"bearing ({a}, {b}) is not on an edge")
            )
            continue
        if len(direction) != d:
            issues.append(
                ValidationIssue("DimensionMismatch", f"bearing ({a}, {b}) has wrong length")
            )
            continue
        if abs(np.linalg.norm(direction) - 1.0) > UNIT_NORM_TOL:
            issues.append(
                ValidationIssue("NotUnitBearing", f"bearing ({a}, {b}) is not unit norm")
            )
        reverse = spec.bearings.get((b, a))
        if reverse is not None and len(reverse) == d:
            if np.linalg.norm(np.add(direction, reverse)) > REVERSAL_TOL:
                issues.append(
                    ValidationIssue(
                        "InconsistentBearings", f"bearings ({a}, {b}) and ({b}, {a}) disagree"
                    )
                )

    positioned = {node.id for node in spec.nodes if node.position is not None}
    for a, b in spec.edges:
        if a not in node_ids or b not in node_ids:
            continue
        if (a, b) in spec.bearings or (b, a) in spec.bearings:
            continue
        if a not in positioned or b not in positioned:
            issues.append(
                ValidationIssue(
                    "MissingPosition",
                    f"edge ({a}, {b}) has neither a bearing nor two positioned ends",
                )
            )
    return issues


def symmetrize(spec):
    """Close the edge set under reversal; idempotent."""
    edges = set(spec.edges)
    edges |= {(b, a) for a, b in spec.edges}
    return dataclasses.replace(spec, edges=frozenset(edges))


def augment_anchors(spec):
    """Connect every pair of anchors (both directions)."""
    edges = set(spec.edges)
    for a, b in itertools.combinations(spec.anchor_ids, 2):
        edges.add((a, b))
        edges.add((b, a))
    return dataclasses.replace(spec, edges=frozenset(edges))


def incidence_matrix(spec):
    """m x n incidence matrix, one row per undirected edge, tail = lower index."""
    index_map = spec.require_index_map()
    edges = spec.undirected_edges()
    H = np.zeros((len(edges), index_map.n), dtype=int)
    for row, (tail, head) in enumerate(edges):
        H[row, tail] = -1
        H[row, head] = 1
    return H
