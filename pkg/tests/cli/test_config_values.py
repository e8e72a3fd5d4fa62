import os
import tempfile
import unittest

from contact_lattice.cli.config_loader import load_spec, load_spec_document, load_system_config
from contact_lattice.cli.live_row_formatter import format_row, render_cell, render_status, truncate
from contact_lattice.cli.schema_validator import spec_errors, validate_spec
from contact_lattice.core.exceptions import SpecValidationError


class TestSystemConfig(unittest.TestCase):

    def test_missing_file_gives_defaults(self):
        defaults = load_system_config("no/such/config.yaml")
        self.assertEqual(defaults.eps_hat, 0.05)
        self.assertEqual(defaults.workers, 1)
        self.assertEqual(load_system_config(None).output_dir, "results")

    def test_values_are_read(self):
        with tempfile.NamedTemporaryFile("w", suffix=".yaml", delete=False) as f:
            f.write("harness:\n  eps_hat: 0.1\n  batches: 10\n  workers: 4\n"
                    "logging:\n  level: DEBUG\noutputs:\n  dir: out\n")
            path = f.name
        try:
            defaults = load_system_config(path)
        finally:
            os.unlink(path)
        self.assertEqual(defaults.eps_hat, 0.1)
        self.assertEqual(defaults.batches, 10)
        self.assertEqual(defaults.workers, 4)
        self.assertEqual(defaults.spacing, 5.0)
        self.assertEqual(defaults.logging_level, "DEBUG")
        self.assertEqual(defaults.output_dir, "out")

    def test_template_loads(self):
        template = os.path.join(os.path.dirname(__file__), "..", "..", "config_template.yaml")
        defaults = load_system_config(template)
        self.assertEqual(defaults.batches, 20)


class TestSpecDocuments(unittest.TestCase):

    def write(self, text):
        f = tempfile.NamedTemporaryFile("w", suffix=".json", delete=False)
        f.write(text)
        f.close()
        self.addCleanup(os.unlink, f.name)
        return f.name

    def test_json_spec(self):
        path = self.write('{"experiment": "oracle_check", "master_seed": 2}')
        self.assertEqual(load_spec_document(path)["master_seed"], 2)
        self.assertEqual(load_spec(path).experiment, "oracle_check")

    def test_unreadable_spec(self):
        with self.assertRaises(SpecValidationError):
            load_spec_document(self.write('{"experiment": '))

    def test_non_mapping_spec(self):
        with self.assertRaises(SpecValidationError) as ctx:
            load_spec_document(self.write("[1, 2]"))
        self.assertEqual(ctx.exception.errors[0]["loc"], "root")


class TestSchemaValidator(unittest.TestCase):

    def test_valid_spec_has_no_errors(self):
        self.assertEqual(validate_spec({"experiment": "oracle_check"}), [])
        self.assertEqual(spec_errors({"experiment": "oracle_check"}), [])

    def test_missing_keys(self):
        errors = validate_spec({"experiment": "stationary", "geometry": {"kind": "torus"}})
        self.assertIn("Missing key: root.geometry.width", errors)

    def test_unknown_experiment(self):
        errors = spec_errors({"experiment": "percolate"})
        self.assertEqual(errors[0]["loc"], "root.experiment")


class TestRowFormatter(unittest.TestCase):

    def test_status_markup(self):
        self.assertEqual(render_status(True), "[green]PASS[/green]")
        self.assertEqual(render_status("FAIL"), "[red]FAIL[/red]")
        self.assertEqual(render_status("Supercritical"), "[bold green]Supercritical[/bold green]")
        self.assertEqual(render_status("other"), "other")

    def test_cells(self):
        self.assertEqual(render_cell("value", 0.123456), "0.1235")
        self.assertEqual(render_cell("value", None), "N/A")
        self.assertEqual(render_cell("decision", "Neither"), "[yellow]Neither[/yellow]")

    def test_truncate(self):
        self.assertEqual(truncate("abc", 5), "abc")
        self.assertEqual(truncate("abcdefgh", 6), "abc...")

    def test_format_row(self):
        row = {"name": "semigroup", "value": 1e-12, "status": "PASS"}
        self.assertEqual(format_row(row, ["name", "value", "status"]),
                         "semigroup | 1e-12 | [green]PASS[/green]")


if __name__ == "__main__":
    unittest.main()
