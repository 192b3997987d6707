import dataclasses

import numpy as np
from django.test import SimpleTestCase
from ninja.testing import TestClient

from bearing_network.urls import api
from localizability.report import classify
from networks import fixtures
from networks.exceptions import InvalidAngle, SingularPerturbedSystem, SingularSystem
from networks.io import spec_to_payload
from protocols.flow import FlowConfig, default_initial_estimate
from rigidity.matrices import bearing_laplacian

from .bounds import (
    error_bound,
    evaluate_scenario,
    norm_checks,
    perturbed_solve,
    simulate_perturbed_flow,
    stability_check,
)
from .runs import sweep
from .scenario import build_scenario, projector_distance


def random_unit(rng, d):
    x = rng.normal(size=d)
    return x / np.linalg.norm(x)


class ProjectorDistanceTests(SimpleTestCase):
    def test_examples(self):
        self.assertAlmostEqual(projector_distance((1, 0), (0, 1)), 1.0, places=14)
        self.assertAlmostEqual(
            projector_distance((1, 0), np.array([1, 1]) / np.sqrt(2)), np.sqrt(2) / 2, places=14
        )
        self.assertLessEqual(projector_distance((0.6, 0.8), (0.6, 0.8)), 1e-15)

    def test_equals_sine_of_angle(self):
        rng = np.random.default_rng(17)
        for d in (2, 3, 5, 10):
            for _ in range(10000):
                x, y = random_unit(rng, d), random_unit(rng, d)
                angle = np.arctan2(np.linalg.norm(x - (x @ y) * y), x @ y)
                self.assertAlmostEqual(projector_distance(x, y), np.sin(angle), delta=1e-12)


class ScenarioTests(SimpleTestCase):
    def test_zero_angles_leave_blocks_exact(self):
        spec = fixtures.cube()
        laplacian = bearing_laplacian(spec)
        scenario = build_scenario(spec, angles={}, laplacian=laplacian)
        self.assertEqual(scenario.epsilon, 0.0)
        np.testing.assert_array_equal(scenario.delta_ff, 0.0)
        np.testing.assert_array_equal(scenario.delta_fa, 0.0)
        np.testing.assert_array_equal(scenario.ff, laplacian.ff)

    def test_two_neighbors_at_thirty_degrees(self):
        spec = fixtures.triangle()
        angles = {("3", "1"): np.pi / 6, ("3", "2"): np.pi / 6}
        scenario = build_scenario(spec, angles=angles, seed=2)
        self.assertAlmostEqual(scenario.epsilon, 2.0, delta=1e-12)
        self.assertAlmostEqual(scenario.max_theta, np.pi / 6, delta=1e-12)
        norms = norm_checks(scenario)
        self.assertTrue(norms.ff_bound_holds)
        self.assertTrue(norms.fa_bound_holds)

    def test_only_follower_rows_are_perturbed(self):
        scenario = build_scenario(fixtures.cube(), max_angle=0.1, seed=1)
        self.assertTrue(all(tail not in ("4", "6") for tail, _ in scenario.angles))
        self.assertEqual(len(scenario.angles), 18)
        self.assertTrue(all(0.0 <= theta <= 0.1 for theta in scenario.angles.values()))

    def test_angles_outside_zero_to_pi(self):
        spec = fixtures.triangle()
        with self.assertRaises(InvalidAngle):
            build_scenario(spec, max_angle=4.0, seed=1)
        with self.assertRaises(InvalidAngle):
            build_scenario(spec, angles={("3", "1"): -0.1})

    def test_seeded_scenarios_repeat(self):
        spec = fixtures.prism()
        first = build_scenario(spec, max_angle=0.2, seed=9)
        second = build_scenario(spec, max_angle=0.2, seed=9)
        np.testing.assert_array_equal(first.ff, second.ff)
        self.assertEqual(first.epsilon, second.epsilon)
        self.assertEqual(first.to_dict()["seed"], 9)


class RandomScenarioTests(SimpleTestCase):
    def test_guarantees_hold(self):
        rng = np.random.default_rng(2718)
        checked = 0
        sufficient = 0
        while checked < 500:
            d = int(rng.choice([2, 3]))
            n = int(rng.integers(4, 13))
            spec = fixtures.random_network(
                rng, d, n, int(rng.integers(2, n)), edge_probability=0.6
            )
            if not classify(spec).is_localizable:
                continue
            checked += 1
            laplacian = bearing_laplacian(spec)
            max_angle = float(10.0 ** rng.uniform(-4, -0.5))
            scenario = build_scenario(
                spec, max_angle=max_angle, seed=int(rng.integers(2**31)), laplacian=laplacian
            )
            result = evaluate_scenario(scenario, laplacian, spec.stacked_positions())
            self.assertTrue(result.norms.ff_bound_holds)
            self.assertTrue(result.norms.fa_bound_holds)
            if result.stability.sufficient_condition_met:
                sufficient += 1
                self.assertTrue(result.stability.actually_stable)
                self.assertIsNotNone(result.bound)
                self.assertIsNotNone(result.solution)
                self.assertTrue(result.bound_holds)
            else:
                self.assertIsNone(result.bound)
                self.assertIsNone(result.bound_holds)
        self.assertGreater(sufficient, 0)

    def test_bound_is_conservative_on_the_cube(self):
        spec = fixtures.cube()
        laplacian = bearing_laplacian(spec)
        outcomes = set()
        for seed in range(50):
            scenario = build_scenario(spec, max_angle=0.05, seed=seed, laplacian=laplacian)
            stability = stability_check(scenario, laplacian)
            outcomes.add((stability.sufficient_condition_met, stability.actually_stable))
        self.assertIn((False, True), outcomes)


class PerturbedSolutionTests(SimpleTestCase):
    def setUp(self):
        self.spec = fixtures.cube()
        self.laplacian = bearing_laplacian(self.spec)
        self.positions = self.spec.stacked_positions()

    def test_exact_bearings_recover_truth(self):
        scenario = build_scenario(self.spec, angles={}, laplacian=self.laplacian)
        solution = perturbed_solve(scenario, self.laplacian, self.positions.anchors)
        self.assertLessEqual(solution.error_norm, 1e-9)
        self.assertEqual(error_bound(scenario, self.laplacian, self.positions), 0.0)

    def test_singular_perturbed_block(self):
        scenario = build_scenario(fixtures.triangle(), angles={})
        singular = dataclasses.replace(scenario, ff=2.0 * np.diag([0.0, 1.0]))
        with self.assertRaises(SingularPerturbedSystem):
            perturbed_solve(singular, bearing_laplacian(fixtures.triangle()), [0, 0, 4, 0])

    def test_flow_reaches_perturbed_solution(self):
        scenario = build_scenario(self.spec, max_angle=0.01, seed=4, laplacian=self.laplacian)
        self.assertTrue(stability_check(scenario, self.laplacian).actually_stable)
        p_a = self.positions.anchors
        target = perturbed_solve(scenario, self.laplacian, p_a, self.positions.followers)
        initial = default_initial_estimate(
            p_a, self.spec.n_followers, 3, np.random.default_rng(6)
        )
        for nodewise in (False, True):
            trajectory = simulate_perturbed_flow(
                scenario,
                p_a,
                initial,
                FlowConfig(record_every=100000),
                truth=self.positions.followers,
                nodewise=nodewise,
            )
            with self.subTest(nodewise=nodewise):
                self.assertTrue(trajectory.converged)
                np.testing.assert_allclose(trajectory.final_estimate, target.estimate, atol=1e-6)
                self.assertAlmostEqual(trajectory.final_error, target.error_norm, delta=1e-6)


class SweepTests(SimpleTestCase):
    def test_errors_shrink_with_the_angle_scale(self):
        result = sweep(fixtures.triangle(), max_angles=(1e-1, 1e-2, 1e-3), seed=11)
        rows = result["rows"]
        self.assertEqual([row["max_angle"] for row in rows], [1e-1, 1e-2, 1e-3])
        epsilons = [row["epsilon"] for row in rows]
        errors = [row["realized_error"] for row in rows]
        self.assertTrue(epsilons[0] > epsilons[1] > epsilons[2])
        self.assertTrue(errors[0] > errors[1] > errors[2])
        self.assertEqual(result["violations"]["error_bound"], 0)

    def test_trials_use_consecutive_seeds(self):
        result = sweep(fixtures.triangle(), max_angles=(0.05,), trials=3, seed=20)
        self.assertEqual([row["seed"] for row in result["rows"]], [20, 21, 22])
        self.assertEqual([row["trial"] for row in result["rows"]], [0, 1, 2])

    def test_fixed_angles(self):
        result = sweep(fixtures.triangle(), angles={})
        (row,) = result["rows"]
        self.assertEqual(row["epsilon"], 0.0)
        self.assertEqual(row["bound"], 0.0)
        self.assertTrue(row["bound_holds"])

    def test_inapplicable_bound(self):
        angles = {("3", "1"): np.pi / 6, ("3", "2"): np.pi / 6}
        (row,) = sweep(fixtures.triangle(), angles=angles, seed=2)["rows"]
        self.assertEqual(row["bound"], "inapplicable")
        self.assertIsNone(row["bound_holds"])

    def test_requires_localizable_network(self):
        with self.assertRaises(SingularSystem):
            sweep(fixtures.square(), max_angles=(0.1,))


class SensitivityApiTests(SimpleTestCase):
    def test_perturb(self):
        client = TestClient(api)
        response = client.post(
            "/sensitivity/perturb",
            json={
                "network": spec_to_payload(fixtures.triangle()),
                "maxAngles": [0.01, 0.001],
                "trials": 2,
                "seed": 3,
            },
        )
        self.assertEqual(response.status_code, 200)
        body = response.json()
        self.assertEqual(len(body["rows"]), 4)
        self.assertEqual(body["violations"]["error_bound"], 0)

    def test_perturb_singular_network(self):
        client = TestClient(api)
        response = client.post(
            "/sensitivity/perturb", json={"network": spec_to_payload(fixtures.square())}
        )
        self.assertEqual(response.status_code, 409)

    def test_perturb_rejects_angle_above_pi(self):
        client = TestClient(api)
        response = client.post(
            "/sensitivity/perturb",
            json={"network": spec_to_payload(fixtures.triangle()), "maxAngles": [4.0]},
        )
        self.assertEqual(response.status_code, 422)
