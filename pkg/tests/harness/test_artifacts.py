import tempfile
import unittest
from pathlib import Path

import numpy as np

from contact_lattice import __version__
from contact_lattice.harness.artifacts import ArtifactWriter, read_csv, read_csv_header, read_json
from contact_lattice.harness.registry import (
    EXPERIMENT_REGISTRY, get_experiment, register_experiment, registered_experiments,
)


class TestArtifactWriter(unittest.TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.writer = ArtifactWriter(Path(self.tmp.name) / "out", "abc123", 7, "tails")

    def tearDown(self):
        self.tmp.cleanup()

    def test_csv_header_and_rows(self):
        path = self.writer.write_csv("tail", [{"n": 1, "p_hat": 0.5}, {"n": 2, "p_hat": np.float64(0.25)}])
        self.assertEqual(path.name, "tails_tail.csv")
        header, rows = read_csv(path)
        self.assertEqual(header["spec_hash"], "abc123")
        self.assertEqual(header["master_seed"], "7")
        self.assertEqual(header["contact_lattice"], __version__)
        self.assertIn("numpy", header)
        self.assertEqual(rows, [{"n": "1", "p_hat": "0.5"}, {"n": "2", "p_hat": "0.25"}])
        self.assertEqual(read_csv_header(path), header)

    def test_float_cells_keep_full_precision(self):
        path = self.writer.write_csv("x", [{"v": 1 / 3}])
        _, rows = read_csv(path)
        self.assertEqual(float(rows[0]["v"]), 1 / 3)

    def test_list_cells_are_joined(self):
        path = self.writer.write_csv("x", [{"pair": (0.1, 0.2)}])
        _, rows = read_csv(path)
        self.assertEqual(rows[0]["pair"], "0.1;0.2")

    def test_json_carries_header(self):
        path = self.writer.write_json("summary", {"rho": np.float64(0.3), "trace": np.arange(3)})
        document = read_json(path)
        self.assertEqual(document["schema_version"], 1)
        self.assertEqual(document["header"]["experiment"], "tails")
        self.assertEqual(document["trace"], [0, 1, 2])
        self.assertAlmostEqual(document["rho"], 0.3)

    def test_no_temporary_files_left(self):
        self.writer.write_csv("a", [{"x": 1}])
        self.writer.write_json("b", {"x": 1})
        names = sorted(p.name for p in self.writer.export_dir.iterdir())
        self.assertEqual(names, ["tails_a.csv", "tails_b.json"])
        self.assertEqual(len(self.writer.written), 2)

    def test_custom_prefix(self):
        writer = ArtifactWriter(self.tmp.name, "h", 0, "scan", prefix="run1")
        self.assertEqual(writer.path_for("thresholds", "csv").name, "run1_thresholds.csv")


class TestRegistry(unittest.TestCase):

    def tearDown(self):
        EXPERIMENT_REGISTRY.pop("test_kind", None)

    def test_builtin_experiments_registered(self):
        kinds = registered_experiments()
        for kind in ("stationary", "tails", "crossings", "scan", "sharpness", "ddcp_trajectory",
                     "ddcp_stationary", "ddcp_percolation", "couple_check", "oracle_check"):
            self.assertIn(kind, kinds)

    def test_register_and_lookup(self):
        @register_experiment("test_kind")
        def runner(spec, ctx):
            return None

        self.assertIs(get_experiment("test_kind"), runner)
        self.assertEqual(runner.experiment_kind, "test_kind")

    def test_duplicate_registration_rejected(self):
        register_experiment("test_kind")(lambda spec, ctx: None)
        with self.assertRaises(ValueError):
            register_experiment("test_kind")(lambda spec, ctx: None)

    def test_non_function_rejected(self):
        with self.assertRaises(TypeError):
            register_experiment("test_kind")(object())

    def test_unknown_kind(self):
        with self.assertRaises(KeyError):
            get_experiment("no_such_experiment")


if __name__ == "__main__":
    unittest.main()
