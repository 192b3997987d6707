from unittest import mock

import numpy as np
import scipy.linalg
from django.test import SimpleTestCase
from ninja.testing import TestClient

from bearing_network.urls import api
from networks import fixtures
from networks.exceptions import AsymmetricInput, RankDisagreement
from networks.io import parse_network, spec_to_payload

from .analysis import is_ibr, summarize, trivial_motion_space
from .matrices import bearing_laplacian, projected_incidence, quadratic_cost, rigidity_matrix
from .spectral import singular_rank, spectral_summary


def two_nodes():
    return fixtures.build_network({1: (0, 0), 2: (1, 0)}, [(1, 2)], anchors=(1,))


def random_specs(seed, count):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        d = int(rng.integers(2, 5))
        n = int(rng.integers(4, 21))
        yield fixtures.random_network(rng, d, n, int(rng.integers(1, n)))


class RigidityMatrixTests(SimpleTestCase):
    def test_two_nodes(self):
        R = rigidity_matrix(two_nodes()).matrix
        np.testing.assert_allclose(R, [[0, 0, 0, 0], [0, -1, 0, 1]], atol=1e-15)

    def test_translations_and_scaling_are_in_the_kernel(self):
        rng = np.random.default_rng(1)
        for name, build in fixtures.FIXTURES.items():
            spec = build()
            R = rigidity_matrix(spec).matrix
            p = spec.stacked_positions().vector
            v = rng.normal(size=spec.dimension)
            with self.subTest(name):
                self.assertLessEqual(np.linalg.norm(R @ np.tile(v, spec.n)), 1e-12)
                self.assertLessEqual(np.linalg.norm(R @ p), 1e-12 * np.linalg.norm(p))

    def test_triangle_rank(self):
        rank, _ = singular_rank(rigidity_matrix(fixtures.triangle()).matrix)
        self.assertEqual(rank, 3)


class LaplacianTests(SimpleTestCase):
    def test_two_nodes(self):
        P = np.diag([0.0, 1.0])
        B = bearing_laplacian(two_nodes()).matrix
        np.testing.assert_allclose(B, np.block([[P, -P], [-P, P]]), atol=1e-15)

    def test_square_rank_and_nullity(self):
        summary = spectral_summary(bearing_laplacian(fixtures.square()).matrix)
        self.assertEqual(summary.order, 8)
        self.assertEqual(summary.rank, 4)
        self.assertEqual(summary.nullity, 4)

    def test_blocks(self):
        laplacian = bearing_laplacian(fixtures.cube())
        self.assertEqual(laplacian.aa.shape, (6, 6))
        self.assertEqual(laplacian.ff.shape, (18, 18))
        np.testing.assert_array_equal(laplacian.af, laplacian.fa.T)
        B = laplacian.matrix
        for i in range(laplacian.index_map.n):
            diagonal = laplacian.block(i, i)
            self.assertAlmostEqual(np.trace(diagonal), len(
                [1 for a, b in laplacian.edges if i in (a, b)]
            ) * (laplacian.dimension - 1))
        self.assertFalse(B.flags.writeable)

    def test_factorization_matches(self):
        for name, build in fixtures.FIXTURES.items():
            laplacian = bearing_laplacian(build())
            R = projected_incidence(laplacian)
            with self.subTest(name):
                np.testing.assert_allclose(R.T @ R, laplacian.matrix, atol=1e-12)

    def test_true_positions_are_an_equilibrium(self):
        for name, build in fixtures.FIXTURES.items():
            spec = build()
            laplacian = bearing_laplacian(spec)
            p = spec.stacked_positions()
            scale = np.linalg.norm(laplacian.matrix, 2) * np.linalg.norm(p.vector)
            with self.subTest(name):
                self.assertLessEqual(np.linalg.norm(laplacian.matrix @ p.vector), 1e-10 * scale)
                residual = laplacian.ff @ p.followers + laplacian.fa @ p.anchors
                self.assertLessEqual(np.linalg.norm(residual), 1e-10 * scale)

    def test_quadratic_form_identity(self):
        rng = np.random.default_rng(12)
        for name, build in fixtures.FIXTURES.items():
            spec = build()
            B = bearing_laplacian(spec).matrix
            for _ in range(100):
                p_hat = rng.normal(scale=5.0, size=B.shape[0])
                quadratic = p_hat @ B @ p_hat
                with self.subTest(name):
                    self.assertAlmostEqual(
                        quadratic_cost(spec, p_hat) / quadratic, 1.0, delta=1e-10
                    )

    def test_measured_bearings_without_follower_positions(self):
        payload = spec_to_payload(fixtures.triangle())
        payload["nodes"][2]["position"] = None
        payload["edges"] = [
            ["1", "2"],
            {"tail": "1", "head": "3", "bearing": [2 / np.sqrt(13), 3 / np.sqrt(13)]},
            {"tail": "2", "head": "3", "bearing": [-2 / np.sqrt(13), 3 / np.sqrt(13)]},
        ]
        spec = parse_network(payload)
        expected = bearing_laplacian(fixtures.triangle()).matrix
        np.testing.assert_allclose(bearing_laplacian(spec).matrix, expected, atol=1e-14)
        evidence = is_ibr(spec)
        self.assertTrue(evidence.is_ibr)
        self.assertEqual(evidence.rigidity_source, "R~")


class SpectralSummaryTests(SimpleTestCase):
    def test_diagonal(self):
        summary = spectral_summary(np.diag([0.0, 1.0, 2.0]))
        self.assertEqual(summary.rank, 2)
        np.testing.assert_allclose(np.abs(summary.null_basis[:, 0]), [1, 0, 0])

    def test_zero_matrix(self):
        summary = spectral_summary(np.zeros((5, 5)))
        self.assertEqual(summary.rank, 0)
        self.assertEqual(summary.nullity, 5)

    def test_asymmetric(self):
        with self.assertRaises(AsymmetricInput):
            spectral_summary(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_basis_is_orthonormal_and_annihilated(self):
        for spec in random_specs(5, 30):
            B = bearing_laplacian(spec).matrix
            summary = spectral_summary(B)
            N = summary.null_basis
            self.assertEqual(summary.rank + summary.nullity, B.shape[0])
            np.testing.assert_allclose(N.T @ N, np.eye(N.shape[1]), atol=1e-10)
            self.assertLessEqual(
                np.linalg.norm(B @ N, 2), 1e3 * summary.tolerance * max(1.0, np.linalg.norm(B, 2))
            )


class InfinitesimalRigidityTests(SimpleTestCase):
    def test_examples(self):
        self.assertTrue(is_ibr(fixtures.triangle()).is_ibr)
        self.assertEqual(is_ibr(fixtures.triangle()).required_rank, 3)
        self.assertFalse(is_ibr(fixtures.square()).is_ibr)
        self.assertEqual(is_ibr(fixtures.square()).rank_laplacian, 4)
        self.assertTrue(is_ibr(two_nodes()).is_ibr)

    def test_rank_disagreement_is_raised(self):
        with mock.patch("rigidity.analysis.singular_rank", return_value=(2, 0.0)):
            with self.assertRaises(RankDisagreement):
                is_ibr(fixtures.triangle())

    def test_rank_override_applies_to_both_ranks(self):
        spec = fixtures.triangle()
        eigenvalues = np.linalg.eigvalsh(bearing_laplacian(spec).matrix)
        positive = eigenvalues[eigenvalues > 1e-9]
        k = int(np.argmax(np.diff(positive)))
        rank_tol = (positive[k] + positive[k + 1]) / 2
        evidence = is_ibr(spec, rank_tol=rank_tol)
        self.assertEqual(evidence.rank_laplacian, int((eigenvalues > rank_tol).sum()))
        self.assertEqual(evidence.rank_rigidity_matrix, evidence.rank_laplacian)
        self.assertEqual(evidence.rigidity_source, "R~")

        evidence = is_ibr(spec, rank_tol=2 * eigenvalues[-1])
        self.assertEqual(evidence.rank_laplacian, 0)
        self.assertFalse(evidence.is_ibr)

    def test_rank_override_below_rounding_floor(self):
        evidence = is_ibr(fixtures.square(), rank_tol=1e-20)
        self.assertEqual(evidence.rank_laplacian, 4)
        self.assertEqual(evidence.rank_rigidity_matrix, 4)
        summary = summarize(fixtures.square(), rank_tol=1e-20)
        self.assertGreater(summary["laplacian"]["tolerance"], 1e-20)
        self.assertEqual(summary["rigidity_matrix"]["source"], "R~")

    def test_random_networks_null_space_facts(self):
        rng = np.random.default_rng(8)
        for spec in random_specs(21, 60):
            d, n = spec.dimension, spec.n
            B = bearing_laplacian(spec).matrix
            norm_B = np.linalg.norm(B, 2)
            p = spec.stacked_positions().vector
            for _ in range(10):
                v = rng.normal(size=d)
                self.assertLessEqual(np.linalg.norm(B @ np.tile(v, n)), 1e-10 * norm_B * np.linalg.norm(v))
            self.assertLessEqual(np.linalg.norm(B @ p), 1e-10 * norm_B * np.linalg.norm(p))

            evidence = is_ibr(spec)
            self.assertLessEqual(evidence.rank_laplacian, d * n - d - 1)
            self.assertEqual(evidence.rank_laplacian, evidence.rank_rigidity_matrix)

            # same kernel: smallest principal angle between the two null spaces
            N_B = spectral_summary(B).null_basis
            R = rigidity_matrix(spec).matrix
            N_R = scipy.linalg.null_space(R, rcond=max(R.shape) * np.finfo(float).eps)
            self.assertEqual(N_B.shape[1], N_R.shape[1])
            angles = scipy.linalg.subspace_angles(N_B, N_R)
            self.assertLessEqual(angles.max(), 1e-8)

    def test_trivial_motions(self):
        for name, build in fixtures.FIXTURES.items():
            spec = build()
            B = bearing_laplacian(spec).matrix
            Q = trivial_motion_space(spec)
            with self.subTest(name):
                self.assertEqual(Q.shape[1], spec.dimension + 1)
                np.testing.assert_allclose(Q.T @ Q, np.eye(spec.dimension + 1), atol=1e-12)
                self.assertLessEqual(np.linalg.norm(B @ Q, 2), 1e-10 * np.linalg.norm(B, 2))

    def test_trivial_motions_span_kernel_of_rigid_networks(self):
        for name in ("triangle", "square-with-diagonal", "hexagonal-pyramid"):
            spec = fixtures.FIXTURES[name]()
            self.assertTrue(is_ibr(spec).is_ibr)
            N = spectral_summary(bearing_laplacian(spec).matrix).null_basis
            angles = scipy.linalg.subspace_angles(N, trivial_motion_space(spec))
            self.assertLessEqual(angles.max(), 1e-8)


class RigidityApiTests(SimpleTestCase):
    def test_summary(self):
        client = TestClient(api)
        response = client.post(
            "/rigidity/summary", json={"network": spec_to_payload(fixtures.square())}
        )
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertEqual(body["laplacian"]["rank"], 4)
        self.assertEqual(body["rigidityMatrix"]["rank"], 4)
        self.assertFalse(body["isIbr"])
        self.assertEqual(summarize(fixtures.triangle())["required_rank"], 3)
