import numpy as np
from django.test import SimpleTestCase, override_settings
from ninja.testing import TestClient

from bearing_network.urls import api
from networks import fixtures
from networks.exceptions import IllConditioned, SingularSystem, StepTooLarge
from networks.io import spec_to_payload
from rigidity.matrices import bearing_laplacian

from .direct import anchor_error_propagation, solve_direct
from .flow import FlowConfig, default_initial_estimate, simulate_flow
from .runs import simulate_network, solve_network


def measured_triangle_payload():
    """Triangle whose follower position is unknown; bearings are given instead."""
    payload = spec_to_payload(fixtures.triangle())
    payload["nodes"][2]["position"] = None
    payload["edges"] = [
        ["1", "2"],
        {"tail": "1", "head": "3", "bearing": [2 / np.sqrt(13), 3 / np.sqrt(13)]},
        {"tail": "2", "head": "3", "bearing": [-2 / np.sqrt(13), 3 / np.sqrt(13)]},
    ]
    return payload


class DirectSolveTests(SimpleTestCase):
    def test_localizable_fixtures_recover_truth(self):
        for name, build in fixtures.LOCALIZABLE.items():
            spec = build()
            truth = spec.stacked_positions()
            p_f = solve_direct(bearing_laplacian(spec), truth.anchors)
            with self.subTest(name):
                error = np.linalg.norm(p_f - truth.followers)
                self.assertLessEqual(error, 1e-8 * np.linalg.norm(truth.followers))

    def test_translating_anchors_translates_followers(self):
        spec = fixtures.cube()
        laplacian = bearing_laplacian(spec)
        truth = spec.stacked_positions()
        shift = np.array([3.0, -2.0, 7.5])
        p_f = solve_direct(laplacian, truth.anchors + np.tile(shift, spec.n_anchors))
        np.testing.assert_allclose(
            p_f, truth.followers + np.tile(shift, spec.n_followers), atol=1e-9
        )

    def test_square_is_singular(self):
        spec = fixtures.square()
        with self.assertRaises(SingularSystem):
            solve_direct(bearing_laplacian(spec), spec.anchor_positions())

    @override_settings(BEARING_ILL_CONDITIONED=1.0)
    def test_ill_conditioned_warning(self):
        spec = fixtures.triangle()
        with self.assertWarns(IllConditioned):
            p_f = solve_direct(bearing_laplacian(spec), spec.anchor_positions())
        np.testing.assert_allclose(p_f, [2.0, 3.0], atol=1e-12)


class AnchorErrorTests(SimpleTestCase):
    def setUp(self):
        self.spec = fixtures.prism(anchors=(2, 6))
        self.laplacian = bearing_laplacian(self.spec)
        self.truth = self.spec.stacked_positions()

    def test_common_offset_moves_followers_rigidly(self):
        offset = np.array([0.1, -0.4, 0.25])
        error = anchor_error_propagation(self.laplacian, np.tile(offset, self.spec.n_anchors))
        np.testing.assert_allclose(
            error, np.tile(offset, self.spec.n_followers), atol=1e-10
        )

    def test_scaled_anchors_scale_followers(self):
        c = 0.3
        error = anchor_error_propagation(self.laplacian, c * self.truth.anchors)
        np.testing.assert_allclose(error, c * self.truth.followers, atol=1e-10)

    def test_zero_error(self):
        error = anchor_error_propagation(self.laplacian, np.zeros(self.truth.anchors.size))
        np.testing.assert_array_equal(error, 0.0)


class FlowConfigTests(SimpleTestCase):
    def test_invalid_values(self):
        for overrides in (
            {"step_size": -1.0},
            {"max_steps": -1},
            {"convergence_tol": 0.0},
            {"record_every": 0},
        ):
            with self.subTest(overrides), self.assertRaises(ValueError):
                FlowConfig(**overrides)

    @override_settings(BEARING_FLOW={"MAX_STEPS": 7})
    def test_from_settings_ignores_missing_overrides(self):
        config = FlowConfig.from_settings(max_steps=None, convergence_tol=1e-6)
        self.assertEqual(config.max_steps, 7)
        self.assertEqual(config.convergence_tol, 1e-6)
        self.assertEqual(config.step_size, "auto")


class FlowTests(SimpleTestCase):
    def run_flow(self, spec, initial, **config):
        laplacian = bearing_laplacian(spec)
        truth = spec.stacked_positions()
        return simulate_flow(
            laplacian,
            truth.anchors,
            initial,
            FlowConfig(**config),
            truth=truth.followers,
        )

    def test_converges_from_random_estimates(self):
        rng = np.random.default_rng(31)
        for name, build in fixtures.LOCALIZABLE.items():
            spec = build()
            p_a = spec.anchor_positions()
            for _ in range(100):
                initial = default_initial_estimate(p_a, spec.n_followers, spec.dimension, rng)
                trajectory = self.run_flow(spec, initial, record_every=100000)
                with self.subTest(name):
                    self.assertTrue(trajectory.converged)
                    self.assertLessEqual(trajectory.final_error, 1e-6)

    def test_error_never_grows(self):
        rng = np.random.default_rng(32)
        for name in ("triangle", "cube", "square-with-diagonal"):
            spec = fixtures.FIXTURES[name]()
            initial = default_initial_estimate(
                spec.anchor_positions(), spec.n_followers, spec.dimension, rng
            )
            errors = [r.error_norm for r in self.run_flow(spec, initial).records]
            with self.subTest(name):
                self.assertTrue(
                    all(later <= earlier + 1e-12 for earlier, later in zip(errors, errors[1:]))
                )

    def test_truth_is_a_fixed_point(self):
        spec = fixtures.cube()
        trajectory = self.run_flow(spec, spec.stacked_positions().followers)
        self.assertTrue(trajectory.converged)
        self.assertEqual(trajectory.steps, 0)
        self.assertEqual(len(trajectory.records), 1)

    def test_singular_network_limit_depends_on_start(self):
        spec = fixtures.square()
        laplacian = bearing_laplacian(spec)
        p_a = spec.anchor_positions()
        limits = []
        for seed in (1, 2):
            initial = default_initial_estimate(
                p_a, spec.n_followers, spec.dimension, np.random.default_rng(seed)
            )
            trajectory = simulate_flow(laplacian, p_a, initial, FlowConfig(record_every=100000))
            self.assertTrue(trajectory.converged)
            limits.append(trajectory.final_estimate)
        self.assertGreater(np.linalg.norm(limits[0] - limits[1]), 1e-3)

    def test_nodewise_matches_matrix_form(self):
        spec = fixtures.prism(anchors=(2, 6))
        laplacian = bearing_laplacian(spec)
        p_a = spec.anchor_positions()
        initial = default_initial_estimate(
            p_a, spec.n_followers, spec.dimension, np.random.default_rng(4)
        )
        config = FlowConfig(max_steps=200)
        stacked = simulate_flow(laplacian, p_a, initial, config)
        nodewise = simulate_flow(laplacian, p_a, initial, config, nodewise=True)
        self.assertEqual(len(stacked.records), len(nodewise.records))
        for a, b in zip(stacked.records, nodewise.records):
            np.testing.assert_allclose(a.estimate, b.estimate, atol=1e-12, rtol=0)

    def test_step_too_large(self):
        spec = fixtures.triangle()
        laplacian = bearing_laplacian(spec)
        lambda_max = np.linalg.eigvalsh(laplacian.ff)[-1]
        with self.assertRaises(StepTooLarge):
            simulate_flow(
                laplacian,
                spec.anchor_positions(),
                np.zeros(2),
                FlowConfig(step_size=2.0 / lambda_max),
            )

    def test_followers_without_edges(self):
        spec = fixtures.build_network(
            {1: (0, 0), 2: (4, 0), 3: (2, 3)}, [(1, 2)], anchors=(1, 2)
        )
        with self.assertRaises(SingularSystem):
            simulate_flow(bearing_laplacian(spec), spec.anchor_positions(), np.zeros(2))

    def test_step_limit(self):
        spec = fixtures.triangle()
        trajectory = self.run_flow(spec, np.zeros(2), max_steps=0)
        self.assertFalse(trajectory.converged)
        self.assertEqual(trajectory.status, "step-limited")
        self.assertEqual(trajectory.steps, 0)

    def test_records_follow_the_stride(self):
        spec = fixtures.triangle()
        trajectory = self.run_flow(spec, np.zeros(2), max_steps=25, record_every=10)
        self.assertEqual([r.step for r in trajectory.records], [0, 10, 20, 25])
        h = trajectory.step_size
        self.assertAlmostEqual(trajectory.final.time, 25 * h)


class RunTests(SimpleTestCase):
    def test_solve_network(self):
        result = solve_network(fixtures.double_triangle(anchors=(1, 2, 6)))
        self.assertLessEqual(result["relative_error"], 1e-8)
        self.assertLessEqual(result["linear_residual"], 1e-9)
        self.assertEqual(len(result["positions"]), 6)

    def test_simulate_is_reproducible(self):
        spec = fixtures.square_with_diagonal()
        _, first = simulate_network(spec, FlowConfig(record_every=1000), seed=3)
        _, second = simulate_network(spec, FlowConfig(record_every=1000), seed=3)
        self.assertEqual(first, second)
        self.assertEqual(first["status"], "converged")
        self.assertFalse(first["perturbed"])
        self.assertIsNone(first["epsilon"])


class ProtocolApiTests(SimpleTestCase):
    def setUp(self):
        self.client = TestClient(api)

    def test_solve_without_follower_position(self):
        response = self.client.post("/protocols/solve", json={"network": measured_triangle_payload()})
        self.assertEqual(response.status_code, 200)
        body = response.json()
        np.testing.assert_allclose(body["positions"]["3"], [2.0, 3.0], atol=1e-10)
        self.assertIsNone(body["errorNorm"])

    def test_solve_singular(self):
        response = self.client.post(
            "/protocols/solve", json={"network": spec_to_payload(fixtures.square())}
        )
        self.assertEqual(response.status_code, 409)
        self.assertEqual(response.json()["code"], "SingularSystem")

    def test_simulate(self):
        response = self.client.post(
            "/protocols/simulate",
            json={"network": spec_to_payload(fixtures.cube()), "seed": 5, "recordEvery": 500},
        )
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertEqual(body["status"], "converged")
        self.assertLessEqual(body["finalError"], 1e-6)
        self.assertEqual(body["records"][0]["step"], 0)

    def test_simulate_bad_config(self):
        response = self.client.post(
            "/protocols/simulate",
            json={"network": spec_to_payload(fixtures.triangle()), "maxSteps": -3},
        )
        self.assertEqual(response.status_code, 400)

    def test_simulate_rejects_angle_above_pi(self):
        response = self.client.post(
            "/protocols/simulate",
            json={"network": spec_to_payload(fixtures.triangle()), "maxAngle": 4.0},
        )
        self.assertEqual(response.status_code, 422)
