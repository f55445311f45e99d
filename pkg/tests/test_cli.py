import csv
import os
import tempfile
import unittest
from unittest.mock import patch

from click.testing import CliRunner

from rsma_outage.cli import cli, run_experiments
from rsma_outage.error_handler import EXIT_CONFIGURATION, EXIT_OK, EXIT_UNKNOWN_EXPERIMENT, EXIT_VALIDATION_FAILED
from rsma_outage.experiments import registry
from rsma_outage.report import CurveCheck


class TestCli(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner()
        self.temp_dir = tempfile.TemporaryDirectory()
        self.out = os.path.join(self.temp_dir.name, "results")

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_list(self):
        result = self.runner.invoke(cli, ["list"])
        self.assertEqual(result.exit_code, 0)
        self.assertIn("fig7: Jain-index vs power, 4 strategies", result.output)
        for name in registry.list_names():
            self.assertIn(f"{name}: ", result.output)

    def test_experiment_required(self):
        result = self.runner.invoke(cli, ["run"])
        self.assertNotEqual(result.exit_code, 0)

    def test_unknown_experiment(self):
        result = self.runner.invoke(cli, ["run", "-e", "fig99", "--out", self.out])
        self.assertEqual(result.exit_code, EXIT_UNKNOWN_EXPERIMENT)
        self.assertFalse(os.path.exists(self.out))

    def test_invalid_config(self):
        config = os.path.join(self.temp_dir.name, "bad.yaml")
        with open(config, "w") as f:
            f.write("system:\n  K: 1\n")
        result = self.runner.invoke(cli, ["run", "--config", config, "-e", "fig3", "--out", self.out])
        self.assertEqual(result.exit_code, EXIT_CONFIGURATION)

    def test_invalid_trials(self):
        result = self.runner.invoke(cli, ["run", "-e", "fig4b", "--trials", "0", "--out", self.out])
        self.assertEqual(result.exit_code, EXIT_CONFIGURATION)

    @patch("rsma_outage.cli.registry.execute")
    def test_exit_status_follows_checks(self, mock_execute):
        mock_execute.return_value = ([], [CurveCheck("a", 0.0, True)])
        result = self.runner.invoke(cli, ["run", "-e", "fig3", "-e", "fig5", "--out", self.out])
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(mock_execute.call_count, 2)
        self.assertTrue(os.path.exists(os.path.join(self.out, "report.txt")))

        mock_execute.return_value = ([], [CurveCheck("a", 0.5, False, "off")])
        result = self.runner.invoke(cli, ["run", "-e", "fig3", "--out", self.out])
        self.assertEqual(result.exit_code, EXIT_VALIDATION_FAILED)
        with open(os.path.join(self.out, "report.txt")) as f:
            self.assertIn("FAIL", f.read())

    @patch("rsma_outage.cli.registry.execute")
    def test_overrides_are_forwarded(self, mock_execute):
        mock_execute.return_value = ([], [])
        status = run_experiments(["fig8"], out_dir=self.out, trials=123, seed=9)
        self.assertEqual(status, EXIT_OK)
        _, kwargs = mock_execute.call_args
        self.assertEqual((kwargs["trials"], kwargs["seed"]), (123, 9))

    def test_admission_run(self):
        result = self.runner.invoke(cli, ["run", "-e", "fig4b", "--trials", "1000", "--seed", "5", "--out", self.out])
        self.assertIn(result.exit_code, (EXIT_OK, EXIT_VALIDATION_FAILED))
        with open(os.path.join(self.out, "fig4b_admission.csv"), newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertTrue(rows)
        self.assertTrue(all(row["trials"] == "1000" and row["seed"] == "5" for row in rows))
        with open(os.path.join(self.out, "report.txt")) as f:
            report = f.read()
        self.assertIn("[fig4b]", report)
        self.assertIn("fig4b_admission.csv", report)


if __name__ == "__main__":
    unittest.main()
