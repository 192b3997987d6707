"""Reference networks and random network generators.

The named networks reproduce the drawings used to illustrate localizability:
a square that bearings alone cannot pin down, a gallery of networks that are
not localizable for their anchor choice, and a gallery that is. Coordinates
are any that match the drawn geometry.
"""
import numpy as np
import networkx as nx

from .spec import NetworkSpec, Node, symmetrize, validate

SQRT3_2 = np.sqrt(3.0) / 2.0


def build_network(positions, edges, anchors, dimension=None):
    """``positions`` maps id -> coordinates (None for unknown followers)."""
    if dimension is None:
        dimension = len(next(p for p in positions.values() if p is not None))
    anchors = {str(a) for a in anchors}
    nodes = tuple(
        Node(
            id=str(node_id),
            position=None if position is None else tuple(float(c) for c in position),
            is_anchor=str(node_id) in anchors,
        )
        for node_id, position in positions.items()
    )
    spec = NetworkSpec(
        dimension=dimension,
        nodes=nodes,
        edges=frozenset((str(a), str(b)) for a, b in edges),
    )
    return validate(symmetrize(spec))


def _cycle(*ids):
    return [(ids[k], ids[(k + 1) % len(ids)]) for k in range(len(ids))]


# square drawn with its true layout and two alternative estimates

SQUARE = {1: (0, 0), 2: (0, -3), 3: (3, -3), 4: (3, 0)}

# followers slid toward the anchors: every bearing preserved
SQUARE_SCALED_ESTIMATE = {1: (0, 0), 2: (0, -3), 3: (2, -3), 4: (2, 0)}

# followers mirrored through the anchor line: only the projected equations hold
SQUARE_MIRRORED_ESTIMATE = {1: (0, 0), 2: (0, -3), 3: (-2, -3), 4: (-2, 0)}


def square():
    return build_network(SQUARE, _cycle(1, 2, 3, 4), anchors=(1, 2))


def triangle():
    return build_network({1: (0, 0), 2: (4, 0), 3: (2, 3)}, _cycle(1, 2, 3), anchors=(1, 2))


def collinear():
    """Follower midway between two anchors on a horizontal line."""
    return build_network(
        {1: (0, 0), 2: (2.5, 0), 3: (5, 0)}, [(1, 2), (2, 3), (1, 3)], anchors=(1, 3)
    )


_SQUARE_4 = {1: (0, 0), 2: (4, 0), 3: (4, -4), 4: (0, -4)}


def square_cycle():
    return build_network(_SQUARE_4, _cycle(1, 2, 3, 4), anchors=(3, 4))


def square_with_diagonal():
    return build_network(_SQUARE_4, _cycle(1, 2, 3, 4) + [(2, 4)], anchors=(3, 4))


_DOUBLE_TRIANGLE = {
    1: (-3 * SQRT3_2, -1.5),
    2: (3 * SQRT3_2, -1.5),
    3: (0, 3),
    4: (-1.5 * SQRT3_2, -0.75),
    5: (1.5 * SQRT3_2, -0.75),
    6: (0, 1.5),
}
_DOUBLE_TRIANGLE_EDGES = _cycle(1, 2, 3) + _cycle(4, 5, 6) + [(1, 4), (2, 5), (3, 6)]


def double_triangle(anchors=(1, 2, 3)):
    """Outer and inner equilateral triangles joined by spokes."""
    return build_network(_DOUBLE_TRIANGLE, _DOUBLE_TRIANGLE_EDGES, anchors=anchors)


_NESTED_SQUARES = {
    1: (0, 0),
    2: (5, 0),
    3: (5, 4),
    4: (0, 4),
    5: (5 / 3, 2),
    6: (10 / 3, 2),
}
_NESTED_SQUARES_EDGES = _cycle(1, 2, 3, 4) + [
    (1, 5),
    (5, 4),
    (2, 6),
    (6, 3),
    (5, 6),
]


def nested_squares(anchors=(1, 2)):
    return build_network(_NESTED_SQUARES, _NESTED_SQUARES_EDGES, anchors=anchors)


_PRISM = {
    1: (0, 1, 1),
    2: (1, 1, 0),
    3: (-1, 1, 0),
    4: (0, 0, 1),
    5: (1, 0, 0),
    6: (-1, 0, 0),
}
_PRISM_EDGES = _cycle(1, 2, 3) + _cycle(4, 5, 6) + [(1, 4), (2, 5), (3, 6)]


def prism(anchors=(5, 6)):
    return build_network(_PRISM, _PRISM_EDGES, anchors=anchors)


_CUBE = {
    1: (0, 1, 0),
    2: (1, 1, 0),
    3: (1, 0, 0),
    4: (0, 0, 0),
    5: (0, 1, 1),
    6: (1, 1, 1),
    7: (1, 0, 1),
    8: (0, 0, 1),
}
_CUBE_EDGES = _cycle(1, 2, 3, 4) + [
    (1, 5),
    (5, 6),
    (6, 2),
    (6, 7),
    (7, 3),
    (5, 8),
    (7, 8),
    (4, 8),
]


def cube(anchors=(4, 6)):
    return build_network(_CUBE, _CUBE_EDGES, anchors=anchors)


def collinear_anchors():
    """Localizable although connecting its collinear anchors leaves it flexible."""
    return build_network(
        {1: (1, 0), 2: (4, 0), 3: (4, 4), 4: (8, 0), 5: (8, 4)},
        [(1, 3), (3, 2), (2, 1), (2, 4), (4, 5), (5, 3)],
        anchors=(1, 2, 4),
    )


def hexagonal_pyramid():
    angles = np.arange(6) * np.pi / 3
    positions = {k + 1: (2 * np.cos(a), 2 * np.sin(a), 0.0) for k, a in enumerate(angles)}
    positions[7] = (0.0, 0.0, 2.0)
    edges = _cycle(1, 2, 3, 4, 5, 6) + [(k, 7) for k in range(1, 7)]
    return build_network(positions, edges, anchors=(1, 2))


NOT_LOCALIZABLE = {
    "square": square,
    "collinear": collinear,
    "square-cycle": square_cycle,
    "double-triangle": double_triangle,
    "nested-squares": nested_squares,
    "prism": prism,
    "cube-corner-anchors": lambda: cube(anchors=(3, 4)),
}

LOCALIZABLE = {
    "triangle": triangle,
    "square-with-diagonal": square_with_diagonal,
    "double-triangle-inner-anchor": lambda: double_triangle(anchors=(1, 2, 6)),
    "nested-squares-inner-anchor": lambda: nested_squares(anchors=(1, 6)),
    "prism-skew-anchors": lambda: prism(anchors=(2, 6)),
    "cube": cube,
    "collinear-anchors": collinear_anchors,
    "hexagonal-pyramid": hexagonal_pyramid,
}

FIXTURES = {**NOT_LOCALIZABLE, **LOCALIZABLE}


def random_network(rng, dimension, n, n_anchors, edge_probability=0.3, extent=10.0):
    """Random connected network: uniform positions, G(n, p) plus a spanning path."""
    positions = rng.uniform(0.0, extent, size=(n, dimension))
    graph = nx.gnp_random_graph(n, edge_probability, seed=int(rng.integers(2**31)))
    order = rng.permutation(n)
    graph.add_edges_from(zip(order[:-1], order[1:]))
    anchors = rng.choice(n, size=n_anchors, replace=False)
    return build_network(
        {k: positions[k] for k in range(n)},
        [(int(a), int(b)) for a, b in graph.edges],
        anchors=[int(a) for a in anchors],
        dimension=dimension,
    )
