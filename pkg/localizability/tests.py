import numpy as np
from django.test import SimpleTestCase, TestCase
from ninja.testing import TestClient

from bearing_network.urls import api
from networks import fixtures
from networks.exceptions import TooFewAnchors
from networks.io import spec_to_payload
from networks.models import SavedNetwork
from rigidity.analysis import is_ibr
from rigidity.matrices import bearing_laplacian

from .conditions import (
    anchor_lower_bound,
    check_algebraic,
    check_augmented_ibr,
    check_rigidity,
)
from .report import Verdict, classify


def single_anchor_triangle():
    return fixtures.build_network({1: (0, 0), 2: (4, 0), 3: (2, 3)}, [(1, 2), (2, 3), (3, 1)], anchors=(1,))


def random_specs(seed, count, n_anchors=None):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        d = int(rng.choice([2, 3, 4]))
        n = int(rng.integers(4, 21))
        k = n_anchors if n_anchors is not None else int(rng.integers(1, n))
        p = float(rng.uniform(0.15, 0.7))
        yield fixtures.random_network(rng, d, n, k, edge_probability=p)


class AlgebraicConditionTests(SimpleTestCase):
    def test_triangle(self):
        check = check_algebraic(bearing_laplacian(fixtures.triangle()))
        self.assertTrue(check.localizable)
        self.assertGreater(check.lambda_min, 0.1)

    def test_square(self):
        check = check_algebraic(bearing_laplacian(fixtures.square()))
        self.assertFalse(check.localizable)
        self.assertLessEqual(check.lambda_min, check.tolerance)

    def test_single_anchor(self):
        self.assertFalse(check_algebraic(bearing_laplacian(single_anchor_triangle())).localizable)


class RigidityConditionTests(SimpleTestCase):
    def test_collinear_witness_moves_middle_follower_along_the_line(self):
        laplacian = bearing_laplacian(fixtures.collinear())
        check = check_rigidity(laplacian)
        self.assertFalse(check.localizable)
        witness = check.witness
        # internal order: anchors 1, 3 then follower 2
        np.testing.assert_allclose(witness[:4], 0.0, atol=1e-15)
        np.testing.assert_allclose(np.abs(witness[4:]), [1.0, 0.0], atol=1e-10)

    def test_triangle(self):
        check = check_rigidity(bearing_laplacian(fixtures.triangle()))
        self.assertTrue(check.localizable)
        self.assertIsNone(check.witness)

    def test_rigid_networks_with_two_anchors(self):
        for name in ("triangle", "square-with-diagonal", "hexagonal-pyramid"):
            with self.subTest(name):
                self.assertTrue(check_rigidity(bearing_laplacian(fixtures.FIXTURES[name]())).localizable)


class AnchorBoundTests(SimpleTestCase):
    def test_rigid_planar_network(self):
        self.assertEqual(anchor_lower_bound(bearing_laplacian(fixtures.triangle())), 1.5)

    def test_square(self):
        self.assertEqual(anchor_lower_bound(bearing_laplacian(fixtures.square())), 2.0)

    def test_localizable_fixtures_meet_the_bound(self):
        for name, build in fixtures.LOCALIZABLE.items():
            spec = build()
            with self.subTest(name):
                self.assertLessEqual(anchor_lower_bound(bearing_laplacian(spec)), spec.n_anchors)


class AugmentedNetworkTests(SimpleTestCase):
    def test_collinear_anchors_localizable_without_rigid_augmentation(self):
        spec = fixtures.collinear_anchors()
        augmented = check_augmented_ibr(spec)
        self.assertFalse(augmented.ibr_augmented)
        self.assertFalse(augmented.equivalence_applies)
        self.assertEqual(classify(spec).verdict, Verdict.LOCALIZABLE)

    def test_inner_anchor_triangle(self):
        augmented = check_augmented_ibr(fixtures.double_triangle(anchors=(1, 2, 6)))
        self.assertTrue(augmented.ibr_augmented)
        self.assertTrue(augmented.sufficient_verdict)

    def test_adjacent_anchors_square(self):
        spec = fixtures.square()
        augmented = check_augmented_ibr(spec)
        self.assertTrue(augmented.equivalence_applies)
        self.assertFalse(augmented.ibr_augmented)
        self.assertEqual(augmented.evidence.rank_laplacian, 4)

    def test_single_anchor(self):
        with self.assertRaises(TooFewAnchors):
            check_augmented_ibr(single_anchor_triangle())


class ClassifyTests(SimpleTestCase):
    def assertWitnessValid(self, report, spec):
        B = bearing_laplacian(spec).matrix
        witness = report.follower_motion_witness
        split = spec.dimension * spec.n_anchors
        self.assertLessEqual(np.linalg.norm(B @ witness), 1e-8 * np.linalg.norm(B, 2))
        self.assertLessEqual(np.abs(witness[:split]).max(initial=0.0), 1e-12)
        self.assertAlmostEqual(np.linalg.norm(witness[split:]), 1.0, places=12)

    def test_not_localizable_fixtures(self):
        for name, build in fixtures.NOT_LOCALIZABLE.items():
            spec = build()
            report = classify(spec)
            with self.subTest(name):
                self.assertEqual(report.verdict, Verdict.NOT_LOCALIZABLE)
                self.assertTrue(report.condition_agreement)
                self.assertWitnessValid(report, spec)

    def test_localizable_fixtures(self):
        for name, build in fixtures.LOCALIZABLE.items():
            report = classify(build())
            with self.subTest(name):
                self.assertEqual(report.verdict, Verdict.LOCALIZABLE)
                self.assertTrue(report.condition_agreement)
                self.assertIsNone(report.follower_motion_witness)

    def test_square_with_diagonal_report(self):
        report = classify(fixtures.square_with_diagonal())
        self.assertTrue(report.ibr_G)
        self.assertTrue(report.ibr_augmented)
        self.assertEqual(report.nullity_B, 3)
        data = report.to_dict()
        self.assertEqual(data["verdict"], "Localizable")
        self.assertIsNone(data["follower_motion_witness"])
        self.assertIn("loc", data["tolerances"])

    def test_witness_reported_by_node(self):
        report = classify(fixtures.collinear())
        witness = report.witness_by_node()
        self.assertEqual(witness["1"], [0.0, 0.0])
        self.assertAlmostEqual(abs(witness["2"][0]), 1.0, places=10)

    def test_single_anchor_reason(self):
        report = classify(single_anchor_triangle())
        self.assertEqual(report.verdict, Verdict.NOT_LOCALIZABLE)
        self.assertIsNone(report.ibr_augmented)
        self.assertTrue(any("below nullity(B)/d" in reason for reason in report.reasons))

    def test_near_singular_band(self):
        spec = fixtures.triangle()
        lambda_min = check_algebraic(bearing_laplacian(spec)).lambda_min
        report = classify(spec, loc_tol=lambda_min / 10)
        self.assertEqual(report.verdict, Verdict.NEAR_SINGULAR)
        self.assertIsNone(report.follower_motion_witness)


class RandomizedConditionTests(SimpleTestCase):
    def test_conditions_agree_outside_the_band(self):
        counts = {verdict: 0 for verdict in Verdict}
        for spec in random_specs(2024, 500):
            report = classify(spec)
            counts[report.verdict] += 1
            if report.verdict != Verdict.NEAR_SINGULAR:
                self.assertEqual(report.algebraic_localizable, report.rigidity_localizable)
                self.assertTrue(report.condition_agreement)
            if report.is_localizable:
                self.assertGreaterEqual(report.n_anchors, report.anchor_lower_bound)
            if report.verdict == Verdict.NOT_LOCALIZABLE:
                self.assertWitnessFree(report, spec)
        self.assertGreater(counts[Verdict.LOCALIZABLE], 0)
        self.assertGreater(counts[Verdict.NOT_LOCALIZABLE], 0)

    def assertWitnessFree(self, report, spec):
        """Witness keeps anchors still and is a bearing motion."""
        B = bearing_laplacian(spec).matrix
        witness = report.follower_motion_witness
        split = spec.dimension * spec.n_anchors
        self.assertLessEqual(np.linalg.norm(B @ witness), 1e-8 * np.linalg.norm(B, 2))
        self.assertEqual(np.abs(witness[:split]).max(initial=0.0), 0.0)

    def test_two_anchor_equivalence(self):
        for spec in random_specs(77, 200, n_anchors=2):
            report = classify(spec)
            if report.verdict == Verdict.NEAR_SINGULAR:
                continue
            self.assertTrue(report.equivalence_applies)
            self.assertEqual(report.is_localizable, report.ibr_augmented)

    def test_single_anchor_never_localizable(self):
        for spec in random_specs(5, 100, n_anchors=1):
            report = classify(spec)
            self.assertFalse(report.is_localizable)
            self.assertIn("fewer than two anchors", report.reasons)

    def test_rigid_networks_with_two_anchors_are_localizable(self):
        rng = np.random.default_rng(99)
        checked = 0
        while checked < 50:
            d = int(rng.choice([2, 3]))
            n = int(rng.integers(4, 12))
            spec = fixtures.random_network(rng, d, n, int(rng.integers(2, n)), edge_probability=0.8)
            if not is_ibr(spec).is_ibr:
                continue
            checked += 1
            self.assertEqual(classify(spec).verdict, Verdict.LOCALIZABLE)


class LocalizabilityApiTests(TestCase):
    def setUp(self):
        self.client = TestClient(api)

    def test_check(self):
        response = self.client.post(
            "/localizability/check", json={"network": spec_to_payload(fixtures.square())}
        )
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertEqual(body["verdict"], "NotLocalizable")
        self.assertEqual(body["nullityB"], 4)
        self.assertEqual(set(body["followerMotionWitness"]), {"1", "2", "3", "4"})

    def test_check_invalid_network(self):
        payload = spec_to_payload(fixtures.triangle())
        payload["dimension"] = 3
        response = self.client.post("/localizability/check", json={"network": payload})
        self.assertEqual(response.status_code, 422)
        self.assertEqual(response.json()["code"], "InvalidNetwork")

    def test_saved_network(self):
        network = SavedNetwork.objects.create(
            name="cube",
            dimension=3,
            payload=spec_to_payload(fixtures.cube()),
            digest="-",
        )
        response = self.client.get(f"/localizability/networks/{network.id}")
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json()["verdict"], "Localizable")

    def test_missing_network(self):
        response = self.client.get("/localizability/networks/999")
        self.assertEqual(response.status_code, 404)
