import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from networks import fixtures
from networks.io import network_digest, spec_to_payload

from .config import RunConfig
from .serializers import coordinate_columns, dumps


class BearingCommandTests(SimpleTestCase):
    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.root = Path(tmp.name)
        self.out = self.root / "out"

    def write(self, name, data):
        path = self.root / name
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
        return str(path)

    def network_file(self, spec, name="network.json"):
        return self.write(name, spec_to_payload(spec))

    def run_command(self, command, path, **options):
        stdout = StringIO()
        call_command("bearing", command, input=path, out=str(self.out), stdout=stdout, **options)
        return json.loads(stdout.getvalue())

    def run_failing(self, command, path, **options):
        stdout = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "bearing", command, input=path, out=str(self.out), stdout=stdout, **options
            )
        output = stdout.getvalue()
        return ctx.exception.returncode, json.loads(output) if output else None

    def test_check_localizable(self):
        report = self.run_command("check", self.network_file(fixtures.triangle()))
        self.assertEqual(report["command"], "check")
        self.assertEqual(report["report"]["verdict"], "Localizable")
        saved = json.loads((self.out / "check.json").read_text())
        self.assertEqual(saved, report)

    def test_check_not_localizable(self):
        code, report = self.run_failing("check", self.network_file(fixtures.square()))
        self.assertEqual(code, 3)
        witness = report["report"]["follower_motion_witness"]
        self.assertEqual(witness["1"], [0.0, 0.0])
        self.assertTrue((self.out / "check.json").exists())

    def test_check_single_anchor(self):
        spec = fixtures.build_network(
            {1: (0, 0), 2: (4, 0), 3: (2, 3)}, [(1, 2), (2, 3), (3, 1)], anchors=(1,)
        )
        code, report = self.run_failing("check", self.network_file(spec))
        self.assertEqual(code, 3)
        self.assertIn("fewer than two anchors", report["report"]["reasons"])

    def test_input_digest_and_seed_are_recorded(self):
        path = self.network_file(fixtures.triangle())
        report = self.run_command("rigidity", path, seed=42)
        payload = json.loads(Path(path).read_text())
        self.assertEqual(report["input"]["digest"], network_digest(payload))
        self.assertEqual(report["seed"], 42)
        self.assertTrue(report["rigidity"]["is_ibr"])

    def test_solve_without_follower_position(self):
        payload = spec_to_payload(fixtures.triangle())
        payload["nodes"][2]["position"] = None
        payload["edges"] = [
            ["1", "2"],
            {"tail": "1", "head": "3", "bearing": [2 / np.sqrt(13), 3 / np.sqrt(13)]},
            {"tail": "2", "head": "3", "bearing": [-2 / np.sqrt(13), 3 / np.sqrt(13)]},
        ]
        report = self.run_command("solve", self.write("measured.json", payload))
        np.testing.assert_allclose(report["solution"]["positions"]["3"], [2.0, 3.0], atol=1e-10)
        self.assertIsNone(report["solution"]["error_norm"])

    def test_solve_singular(self):
        code, report = self.run_failing("solve", self.network_file(fixtures.square()))
        self.assertEqual(code, 3)
        self.assertIsNone(report)

    def test_simulate_writes_trajectory(self):
        report = self.run_command(
            "simulate", self.network_file(fixtures.cube()), seed=3, record_every=50
        )
        summary = report["summary"]
        self.assertEqual(summary["status"], "converged")
        self.assertLessEqual(summary["final_error"], 1e-6)
        with (self.out / "trajectory.csv").open(newline="") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0][:4], ["step", "t", "1_x", "1_y"])
        self.assertEqual(rows[0][-2:], ["velocity_inf_norm", "error_norm"])
        self.assertEqual(len(rows[0]), 2 + 18 + 2)
        self.assertEqual(int(rows[-1][0]), summary["steps"])

    def test_simulate_step_limit(self):
        code, report = self.run_failing(
            "simulate", self.network_file(fixtures.triangle()), max_steps=0
        )
        self.assertEqual(code, 5)
        self.assertEqual(report["summary"]["status"], "step-limited")
        self.assertEqual(report["flow"]["max_steps"], 0)

    def test_simulate_with_measured_bearings(self):
        report = self.run_command(
            "simulate",
            self.network_file(fixtures.triangle()),
            max_angle=[0.01],
            record_every=1000,
        )
        self.assertTrue(report["summary"]["perturbed"])
        self.assertGreater(report["summary"]["epsilon"], 0.0)

    def test_perturb_with_exact_angles(self):
        angles = self.write("angles.json", [])
        report = self.run_command(
            "perturb", self.network_file(fixtures.triangle()), angles_file=angles
        )
        (row,) = report["sensitivity"]["rows"]
        self.assertEqual(row["epsilon"], 0.0)
        self.assertTrue(row["bound_holds"])

    def test_perturb_angle_file(self):
        angles = self.write(
            "angles.json",
            [{"tail": 3, "head": 1, "angle": np.pi / 6}, {"tail": 3, "head": 2, "angle": np.pi / 6}],
        )
        report = self.run_command(
            "perturb", self.network_file(fixtures.triangle()), angles_file=angles
        )
        (row,) = report["sensitivity"]["rows"]
        self.assertAlmostEqual(row["epsilon"], 2.0, delta=1e-12)
        self.assertEqual(row["bound"], "inapplicable")

    def test_perturb_sweep(self):
        report = self.run_command(
            "perturb",
            self.network_file(fixtures.cube()),
            max_angle=[0.01, 0.001],
            trials=2,
            seed=7,
        )
        rows = report["sensitivity"]["rows"]
        self.assertEqual([row["seed"] for row in rows], [7, 8, 7, 8])
        self.assertEqual(report["sensitivity"]["violations"]["error_bound"], 0)
        self.assertTrue((self.out / "perturb.json").exists())

    def test_check_with_tiny_rank_tolerance(self):
        code, report = self.run_failing(
            "check", self.network_file(fixtures.square()), tol_rank=1e-20
        )
        self.assertEqual(code, 3)
        self.assertEqual(report["report"]["rank_B"], 4)

    def test_simulate_followers_without_edges(self):
        spec = fixtures.build_network(
            {1: (0, 0), 2: (4, 0), 3: (2, 3)}, [(1, 2)], anchors=(1, 2)
        )
        code, report = self.run_failing("simulate", self.network_file(spec))
        self.assertEqual(code, 3)
        self.assertIsNone(report)

    def test_perturb_angle_above_pi(self):
        code, report = self.run_failing(
            "perturb", self.network_file(fixtures.triangle()), max_angle=[4.0], trials=5
        )
        self.assertEqual(code, 1)
        self.assertIsNone(report)

    def test_angles_file_above_pi(self):
        angles = self.write("angles.json", [{"tail": 3, "head": 1, "angle": 3.5}])
        code, _ = self.run_failing(
            "perturb", self.network_file(fixtures.triangle()), angles_file=angles
        )
        self.assertEqual(code, 1)

    def test_malformed_input(self):
        code, report = self.run_failing("check", self.write("broken.json", "{"))
        self.assertEqual(code, 1)
        self.assertIsNone(report)

    def test_bad_step(self):
        code, _ = self.run_failing("simulate", self.network_file(fixtures.triangle()), step="fast")
        self.assertEqual(code, 1)

    def test_emit_matrices(self):
        self.run_command("rigidity", self.network_file(fixtures.triangle()), emit_matrices=True)
        B = np.loadtxt(self.out / "bearing_laplacian.csv", delimiter=",")
        R = np.loadtxt(self.out / "rigidity_matrix.csv", delimiter=",")
        self.assertEqual(B.shape, (6, 6))
        self.assertEqual(R.shape, (6, 6))
        np.testing.assert_allclose(B, B.T, atol=1e-15)


class RunConfigTests(SimpleTestCase):
    def test_defaults(self):
        config = RunConfig.from_options("check", {"input": "net.json"})
        self.assertIsNone(config.out)
        self.assertEqual(config.max_angles, ())
        self.assertEqual(config.flow.step_size, "auto")
        self.assertEqual(config.tolerances()["near_singular_factor"], 1e3)

    def test_flow_overrides(self):
        config = RunConfig.from_options(
            "simulate", {"input": "net.json", "step": 0.1, "max_steps": 10, "max_angle": [0.2]}
        )
        self.assertEqual(config.flow_dict()["step_size"], 0.1)
        self.assertEqual(config.flow.max_steps, 10)
        self.assertEqual(config.max_angles, (0.2,))

    def test_angle_range(self):
        with self.assertRaises(ValueError):
            RunConfig.from_options("perturb", {"input": "net.json", "max_angle": [0.1, 4.0]})
        config = RunConfig.from_options("perturb", {"input": "net.json", "max_angle": [np.pi]})
        self.assertEqual(config.max_angles, (np.pi,))


class SerializerTests(SimpleTestCase):
    def test_numpy_values(self):
        data = json.loads(dumps({"a": np.float64(1.5), "b": np.arange(3), "c": np.bool_(True)}))
        self.assertEqual(data, {"a": 1.5, "b": [0, 1, 2], "c": True})

    def test_nan_is_rejected(self):
        with self.assertRaises(ValueError):
            dumps({"x": float("nan")})

    def test_coordinate_columns_beyond_three_dimensions(self):
        spec = fixtures.random_network(np.random.default_rng(0), 4, 5, 2)
        columns = coordinate_columns(spec.require_index_map(), 4)
        self.assertEqual(len(columns), 3 * 4)
        self.assertTrue(columns[0].endswith("_c0"))
