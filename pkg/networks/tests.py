import json
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase, TestCase
from ninja.testing import TestClient

from bearing_network.urls import api

from . import fixtures
from .exceptions import MalformedNetwork, MissingPositions, NetworkValidationError
from .io import load_angles, network_digest, parse_network, spec_to_payload
from .models import SavedNetwork
from .spec import (
    IndexMap,
    NetworkSpec,
    Node,
    augment_anchors,
    incidence_matrix,
    symmetrize,
    validate,
)

TRIANGLE_PAYLOAD = {
    "dimension": 2,
    "nodes": [
        {"id": "1", "position": [0, 0], "anchor": True},
        {"id": "2", "position": [4, 0], "anchor": True},
        {"id": "3", "position": [2, 3]},
    ],
    "edges": [["1", "2"], ["2", "3"], ["3", "1"]],
}


def make_spec(positions, edges, anchors, dimension=2):
    nodes = tuple(
        Node(id=k, position=None if p is None else tuple(p), is_anchor=k in anchors)
        for k, p in positions.items()
    )
    return NetworkSpec(dimension=dimension, nodes=nodes, edges=frozenset(edges))


class ValidateTests(SimpleTestCase):
    def test_collocated_nodes_rejected(self):
        spec = make_spec({"a": (0, 0), "b": (0, 0)}, {("a", "b")}, {"a"})
        with self.assertRaises(NetworkValidationError) as ctx:
            validate(spec)
        self.assertIn("CollocatedNodes", ctx.exception.codes)

    def test_square_is_valid(self):
        spec = fixtures.square()
        self.assertEqual(spec.index_map.anchor_ids, ("1", "2"))
        self.assertEqual(spec.index_map.follower_ids, ("3", "4"))

    def test_unknown_node_in_edge(self):
        spec = make_spec({"1": (0, 0), "2": (1, 0)}, {("1", "x9")}, {"1"})
        with self.assertRaises(NetworkValidationError) as ctx:
            validate(spec)
        self.assertIn("DanglingEdge", ctx.exception.codes)

    def test_every_issue_is_reported(self):
        spec = make_spec(
            {"1": (0, 0), "2": (0, 0, 1), "3": (0, 0)},
            {("1", "1")},
            {"1", "2", "3"},
        )
        with self.assertRaises(NetworkValidationError) as ctx:
            validate(spec)
        codes = set(ctx.exception.codes)
        self.assertTrue({"DimensionMismatch", "NoFollowers", "DanglingEdge"} <= codes)

    def test_anchor_needs_position(self):
        spec = make_spec({"1": None, "2": (1, 0)}, {("1", "2")}, {"1"})
        with self.assertRaises(NetworkValidationError) as ctx:
            validate(spec)
        self.assertIn("MissingPosition", ctx.exception.codes)

    def test_dimension_below_two(self):
        spec = make_spec({"1": (0,), "2": (1,)}, {("1", "2")}, {"1"}, dimension=1)
        with self.assertRaises(NetworkValidationError) as ctx:
            validate(spec)
        self.assertIn("DimensionMismatch", ctx.exception.codes)

    def test_index_map_round_trips(self):
        spec = fixtures.double_triangle(anchors=(1, 2, 6))
        index_map = spec.index_map
        self.assertEqual(index_map.ids[:3], ("1", "2", "6"))
        for node_id in spec.node_ids:
            self.assertEqual(index_map.id_of(index_map.index_of(node_id)), node_id)
        self.assertTrue(all(index_map.is_anchor(i) for i in range(index_map.n_anchors)))

    def test_stacked_position_blocks(self):
        p = fixtures.triangle().stacked_positions()
        np.testing.assert_array_equal(p.anchors, [0, 0, 4, 0])
        np.testing.assert_array_equal(p.followers, [2, 3])
        np.testing.assert_array_equal(np.concatenate([p.anchors, p.followers]), p.vector)


class EdgeSetTests(SimpleTestCase):
    def test_symmetrize_single_edge(self):
        spec = make_spec({"1": (0, 0), "2": (1, 0)}, {("1", "2")}, {"1"})
        self.assertEqual(symmetrize(spec).edges, {("1", "2"), ("2", "1")})

    def test_symmetrize_is_idempotent(self):
        spec = symmetrize(fixtures.square())
        self.assertEqual(symmetrize(spec).edges, spec.edges)

    def test_symmetrize_closes_cycle(self):
        spec = make_spec(
            {"1": (0, 0), "2": (1, 0), "3": (0, 1)},
            {("1", "2"), ("2", "3"), ("3", "1")},
            {"1"},
        )
        undirected = {frozenset(e) for e in symmetrize(spec).edges}
        self.assertEqual(len(symmetrize(spec).edges), 6)
        self.assertEqual(undirected, {frozenset(p) for p in [("1", "2"), ("2", "3"), ("3", "1")]})

    def test_augment_adds_missing_anchor_pair(self):
        spec = fixtures.collinear()
        self.assertEqual(augment_anchors(spec).edges, spec.edges)
        spec = fixtures.square_cycle()
        added = augment_anchors(spec).edges - spec.edges
        self.assertEqual(added, set())
        spec = fixtures.nested_squares(anchors=(1, 6))
        added = augment_anchors(spec).edges - spec.edges
        self.assertEqual(added, {("1", "6"), ("6", "1")})

    def test_augment_triangle_unchanged(self):
        spec = fixtures.triangle()
        self.assertEqual(augment_anchors(spec).edges, spec.edges)

    def test_augment_three_isolated_anchors(self):
        spec = validate(
            symmetrize(
                make_spec(
                    {"1": (0, 0), "2": (4, 0), "3": (0, 4), "4": (1, 1)},
                    {("1", "4"), ("2", "4"), ("3", "4")},
                    {"1", "2", "3"},
                )
            )
        )
        added = {frozenset(e) for e in augment_anchors(spec).edges - spec.edges}
        self.assertEqual(len(added), 3)

    def test_augment_and_symmetrize_commute(self):
        spec = fixtures.double_triangle(anchors=(1, 2, 6))
        self.assertEqual(
            augment_anchors(symmetrize(spec)).edges, symmetrize(augment_anchors(spec)).edges
        )
        twice = augment_anchors(augment_anchors(spec))
        self.assertEqual(twice.edges, augment_anchors(spec).edges)


class IncidenceTests(SimpleTestCase):
    def test_single_edge(self):
        spec = fixtures.build_network({1: (0, 0), 2: (1, 0)}, [(1, 2)], anchors=(1,))
        np.testing.assert_array_equal(incidence_matrix(spec), [[-1, 1]])

    def test_rows_sum_to_zero(self):
        for name, build in fixtures.FIXTURES.items():
            H = incidence_matrix(build())
            with self.subTest(name):
                np.testing.assert_array_equal(H @ np.ones(H.shape[1], dtype=int), 0)
                self.assertTrue(((H == 1).sum(axis=1) == 1).all())
                self.assertTrue(((H == -1).sum(axis=1) == 1).all())

    def test_cycle_rank(self):
        H = incidence_matrix(fixtures.square())
        self.assertEqual(H.shape, (4, 4))
        self.assertEqual(np.linalg.matrix_rank(H), 3)

    def test_triangle_shape(self):
        self.assertEqual(incidence_matrix(fixtures.triangle()).shape, (3, 3))


class LoadingTests(SimpleTestCase):
    def test_parse_symmetrizes_directed_edges(self):
        spec = parse_network(TRIANGLE_PAYLOAD)
        self.assertEqual(len(spec.edges), 6)
        self.assertEqual(spec.index_map.follower_ids, ("3",))

    def test_numeric_ids_are_accepted(self):
        payload = json.loads(json.dumps(TRIANGLE_PAYLOAD).replace('"1"', "1"))
        spec = parse_network(payload)
        self.assertIn("1", spec.node_ids)

    def test_measured_bearings_allow_unknown_followers(self):
        payload = {
            "dimension": 2,
            "nodes": [
                {"id": "a", "position": [0, 0], "anchor": True},
                {"id": "b", "position": [4, 0], "anchor": True},
                {"id": "c"},
            ],
            "edges": [
                ["a", "b"],
                {"tail": "a", "head": "c", "bearing": [0.6, 0.8]},
                {"tail": "b", "head": "c", "bearing": [-0.6, 0.8]},
            ],
        }
        spec = parse_network(payload)
        self.assertFalse(spec.has_positions)
        np.testing.assert_allclose(spec.bearing("c", "a"), [-0.6, -0.8])
        with self.assertRaises(MissingPositions):
            spec.positions()

    def test_inconsistent_bearings(self):
        payload = {
            "dimension": 2,
            "nodes": [
                {"id": "a", "position": [0, 0], "anchor": True},
                {"id": "c", "position": [1, 0]},
            ],
            "edges": [
                {"tail": "a", "head": "c", "bearing": [1, 0]},
                {"tail": "c", "head": "a", "bearing": [1, 0]},
            ],
        }
        with self.assertRaises(NetworkValidationError) as ctx:
            parse_network(payload)
        self.assertIn("InconsistentBearings", ctx.exception.codes)

    def test_non_unit_bearing(self):
        payload = dict(TRIANGLE_PAYLOAD)
        payload["edges"] = [["1", "2"], ["1", "3"], {"tail": "2", "head": "3", "bearing": [1, 1]}]
        with self.assertRaises(NetworkValidationError) as ctx:
            parse_network(payload)
        self.assertIn("NotUnitBearing", ctx.exception.codes)

    def test_malformed_structure(self):
        with self.assertRaises(MalformedNetwork):
            parse_network({"dimension": 2, "nodes": "none"})
        with self.assertRaises(MalformedNetwork):
            parse_network({**TRIANGLE_PAYLOAD, "edges": [["1", "2", "3"]]})

    def test_digest_ignores_key_order(self):
        reordered = {k: TRIANGLE_PAYLOAD[k] for k in reversed(list(TRIANGLE_PAYLOAD))}
        self.assertEqual(network_digest(reordered), network_digest(TRIANGLE_PAYLOAD))

    def test_fixture_payload_round_trip(self):
        spec = fixtures.cube()
        again = parse_network(spec_to_payload(spec))
        self.assertEqual(again.edges, spec.edges)
        self.assertEqual(again.index_map, spec.index_map)

    def test_angles_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "angles.json"
            path.write_text(json.dumps([{"tail": 3, "head": "1", "angle": 0.25}]))
            self.assertEqual(load_angles(path), {("3", "1"): 0.25})
            path.write_text(json.dumps([{"tail": "3"}]))
            with self.assertRaises(MalformedNetwork):
                load_angles(path)


class RandomNetworkTests(SimpleTestCase):
    def test_random_networks_are_connected_and_valid(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            d = int(rng.integers(2, 5))
            n = int(rng.integers(4, 21))
            spec = fixtures.random_network(rng, d, n, int(rng.integers(1, n)))
            self.assertEqual(spec.n, n)
            self.assertGreaterEqual(len(spec.undirected_edges()), n - 1)


class NetworkApiTests(TestCase):
    def setUp(self):
        self.client = TestClient(api)

    def test_create_list_get_delete(self):
        response = self.client.post(
            "/networks/", json={"name": "triangle", "network": TRIANGLE_PAYLOAD}
        )
        self.assertEqual(response.status_code, 201)
        created = response.json()
        self.assertEqual(created["nAnchors"], 2)
        self.assertEqual(created["nFollowers"], 1)

        listing = self.client.get("/networks/").json()
        self.assertEqual([item["id"] for item in listing], [created["id"]])

        detail = self.client.get(f"/networks/{created['id']}").json()
        self.assertEqual(detail["network"]["dimension"], 2)
        self.assertEqual(detail["digest"], created["digest"])

        response = self.client.delete(f"/networks/{created['id']}")
        self.assertEqual(response.status_code, 204)
        self.assertFalse(SavedNetwork.objects.exists())

    def test_invalid_network_is_not_saved(self):
        payload = dict(TRIANGLE_PAYLOAD)
        payload["edges"] = [["1", "x9"]]
        response = self.client.post("/networks/", json={"name": "bad", "network": payload})
        self.assertEqual(response.status_code, 422)
        self.assertEqual(response.json()["code"], "InvalidNetwork")
        self.assertFalse(SavedNetwork.objects.exists())

    def test_validate_endpoint(self):
        response = self.client.post("/networks/validate", json=TRIANGLE_PAYLOAD)
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertTrue(body["valid"])
        self.assertEqual(body["followers"], ["3"])
        self.assertEqual(len(body["edges"]), 3)

    def test_validate_reports_issues(self):
        payload = dict(TRIANGLE_PAYLOAD)
        payload["edges"] = [["1", "1"]]
        response = self.client.post("/networks/validate", json=payload)
        self.assertEqual(response.status_code, 422)
        body = response.json()
        self.assertEqual(body["code"], "InvalidNetwork")
        self.assertIn("DanglingEdge", [issue["code"] for issue in body["issues"]])

    def test_saved_network_rebuilds_spec(self):
        network = SavedNetwork.objects.create(
            name="square",
            dimension=2,
            payload=spec_to_payload(fixtures.square()),
            digest="x",
        )
        self.assertEqual(network.to_spec().index_map.anchor_ids, ("1", "2"))
