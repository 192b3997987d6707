import numpy as np
from django.test import SimpleTestCase

from networks import fixtures
from networks.exceptions import CollocatedEstimates, CollocatedNodes, NotUnit, ZeroVector

from .geometry import angle_between, bearing, perturb_bearing, projector
from .residuals import linear_residual, nonlinear_residual


def stacked(spec, positions):
    """Stack ``{id: coords}`` in the spec's internal order."""
    return np.concatenate(
        [np.asarray(positions[int(i)], dtype=float) for i in spec.index_map.ids]
    )


class BearingTests(SimpleTestCase):
    def test_axis_aligned(self):
        np.testing.assert_allclose(bearing((0, 0), (2, 0)).direction, [1, 0])
        np.testing.assert_allclose(bearing((0, 0, 0), (0, 0, -5)).direction, [0, 0, -1])

    def test_diagonal(self):
        np.testing.assert_allclose(
            bearing((0, 0), (1, 1)).direction, [np.sqrt(2) / 2, np.sqrt(2) / 2]
        )

    def test_collocated(self):
        with self.assertRaises(CollocatedNodes):
            bearing((1.0, 2.0), (1.0, 2.0))

    def test_antisymmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            p, q = rng.normal(size=(2, 3)) * 10
            forward = bearing(p, q).direction
            backward = bearing(q, p).direction
            self.assertLessEqual(np.abs(forward + backward).max(), 1e-15)

    def test_reversed_swaps_ends(self):
        g = bearing((0, 0), (0, 2), tail="a", head="b")
        back = g.reversed()
        self.assertEqual((back.tail, back.head), ("b", "a"))
        np.testing.assert_allclose(back.direction, [0, -1])


class ProjectorTests(SimpleTestCase):
    def test_axis(self):
        np.testing.assert_allclose(projector((1, 0)), [[0, 0], [0, 1]])

    def test_diagonal(self):
        np.testing.assert_allclose(
            projector(np.array([1, 1]) / np.sqrt(2)), [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15
        )

    def test_zero_vector(self):
        with self.assertRaises(ZeroVector):
            projector((0, 0, 0))

    def test_projector_properties(self):
        rng = np.random.default_rng(11)
        for d in (2, 3, 5):
            for _ in range(50):
                x = rng.normal(size=d)
                P = projector(x)
                np.testing.assert_allclose(P, P.T, atol=1e-15)
                np.testing.assert_allclose(P @ P, P, atol=1e-14)
                np.testing.assert_allclose(P @ x, 0, atol=1e-12 * np.linalg.norm(x))
                self.assertAlmostEqual(np.trace(P), d - 1, places=12)


class AngleTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(angle_between((1, 0), (1, 0)), 0.0)
        self.assertAlmostEqual(angle_between((1, 0), (0, 1)), np.pi / 2, places=15)
        self.assertAlmostEqual(angle_between((1, 0), (-1, 0)), np.pi, places=15)

    def test_small_angles_keep_precision(self):
        for theta in (1e-9, 1e-6, 1e-3):
            g_tilde = (np.cos(theta), np.sin(theta))
            self.assertAlmostEqual(angle_between((1, 0), g_tilde) / theta, 1.0, places=6)

    def test_not_unit(self):
        with self.assertRaises(NotUnit):
            angle_between((1, 0), (2, 0))


class PerturbTests(SimpleTestCase):
    def test_zero_angle_is_identity(self):
        g = np.array([0.6, 0.8])
        np.testing.assert_allclose(perturb_bearing(g, 0.0, 1), g, atol=1e-15)

    def test_right_angle_is_orthogonal(self):
        g = np.array([0.0, 0.6, 0.8])
        g_tilde = perturb_bearing(g, np.pi / 2, 5)
        self.assertLessEqual(abs(g @ g_tilde), 1e-10)
        self.assertAlmostEqual(np.linalg.norm(g_tilde), 1.0, places=14)

    def test_angle_round_trip(self):
        rng = np.random.default_rng(0)
        for d in (2, 3, 4, 10):
            for seed in range(25):
                g = rng.normal(size=d)
                g /= np.linalg.norm(g)
                g_tilde = perturb_bearing(g, 0.3, seed)
                self.assertAlmostEqual(angle_between(g, g_tilde), 0.3, delta=1e-10)

    def test_seed_reproducible(self):
        g = np.array([1.0, 0.0, 0.0])
        np.testing.assert_array_equal(perturb_bearing(g, 0.2, 9), perturb_bearing(g, 0.2, 9))

    def test_angle_outside_range(self):
        with self.assertRaises(ValueError):
            perturb_bearing(np.array([1.0, 0.0]), 4.0, 0)


class ResidualTests(SimpleTestCase):
    def setUp(self):
        self.spec = fixtures.square()

    def test_truth_has_zero_residuals(self):
        truth = self.spec.stacked_positions()
        self.assertLessEqual(nonlinear_residual(self.spec, truth).max(), 1e-15)
        self.assertLessEqual(linear_residual(self.spec, truth).max(), 1e-15)

    def test_scaled_estimate_solves_both_systems(self):
        estimate = stacked(self.spec, fixtures.SQUARE_SCALED_ESTIMATE)
        self.assertTrue(nonlinear_residual(self.spec, estimate).is_satisfied())
        self.assertTrue(linear_residual(self.spec, estimate).is_satisfied())

    def test_mirrored_estimate_solves_only_the_linear_system(self):
        estimate = stacked(self.spec, fixtures.SQUARE_MIRRORED_ESTIMATE)
        self.assertTrue(linear_residual(self.spec, estimate).is_satisfied())
        residuals = nonlinear_residual(self.spec, estimate)
        self.assertAlmostEqual(max(residuals.edges.values()), 2.0, places=12)
        self.assertAlmostEqual(residuals.edges[("2", "3")], 2.0, places=12)

    def test_collocated_estimates(self):
        estimate = stacked(self.spec, {1: (0, 0), 2: (0, -3), 3: (0, -3), 4: (3, 0)})
        with self.assertRaises(CollocatedEstimates):
            nonlinear_residual(self.spec, estimate)
        self.assertGreater(linear_residual(self.spec, estimate).max(), 0.0)

    def test_anchor_error_shows_up(self):
        estimate = stacked(self.spec, {1: (0, 1), 2: (0, -3), 3: (3, -3), 4: (3, 0)})
        self.assertAlmostEqual(linear_residual(self.spec, estimate).anchors["1"], 1.0)

    def test_nonlinear_solutions_solve_the_linear_system(self):
        rng = np.random.default_rng(4)
        for name, build in fixtures.FIXTURES.items():
            spec = build()
            truth = spec.stacked_positions().vector
            for _ in range(10):
                # bearings survive any positive scaling plus translation
                estimate = rng.uniform(0.5, 3.0) * truth + np.tile(
                    rng.normal(size=spec.dimension), spec.n
                )
                with self.subTest(name):
                    self.assertTrue(nonlinear_residual(spec, estimate).edges_satisfied())
                    self.assertTrue(linear_residual(spec, estimate).edges_satisfied())
