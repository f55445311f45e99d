import csv
import math
import os
import tempfile
import unittest

from rsma_outage.config import load_scenario
from rsma_outage.exceptions import ExperimentNotFoundError, InvalidParameterError
from rsma_outage.experiments import ExperimentOutput, ExperimentRegistry, Sweep, _secondary_first_check, registry
from rsma_outage.report import CurveCheck, Table


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestSweep(unittest.TestCase):
    def test_points(self):
        self.assertEqual(Sweep(0.0, 30.0, 5.0).points(), [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0])
        self.assertEqual(Sweep(0.5, 4.0, 0.5, axis="rate_p").points()[-1], 4.0)
        self.assertEqual(len(Sweep(35.0, 45.0, 2.5).points()), 5)
        self.assertEqual(Sweep(10.0, 10.0, 5.0).points(), [10.0])

    def test_invalid(self):
        with self.assertRaises(InvalidParameterError):
            Sweep(0.0, 10.0, 0.0)
        with self.assertRaises(InvalidParameterError):
            Sweep(10.0, 0.0, 1.0)


class TestRegistry(unittest.TestCase):
    def test_builtin_experiments(self):
        self.assertEqual(
            registry.list_names(),
            ["fig3", "fig4a", "fig4b", "fig5", "fig6a", "fig6b", "fig7", "fig8", "fig9", "lemma1", "slopes"],
        )
        self.assertIn(("fig7", "Jain-index vs power, 4 strategies"), registry.list_experiments())

    def test_unknown_experiment(self):
        with self.assertRaises(ExperimentNotFoundError) as context:
            registry.get("fig99")
        self.assertIn("fig3", context.exception.available)

    def test_build_spec_defaults(self):
        spec = registry.build_spec("fig4a", load_scenario())
        self.assertEqual(spec.schemes, ("GUS", "CUS", "RUS"))
        self.assertEqual(spec.sweep.points()[0], 0.0)
        self.assertEqual(spec.trials, 1_000_000)
        self.assertEqual(spec.params, {"rate_p": 2.0, "rate_s": 2.0})

    def test_build_spec_precedence(self):
        scenario = load_scenario(
            overrides={"experiments": {"fig5": {"trials": 500, "seed": 3, "sweep": {"start": 1, "stop": 2, "step": 1}, "params": {"power_dbm": 20}}}}
        )
        spec = registry.build_spec("fig5", scenario)
        self.assertEqual((spec.trials, spec.seed), (500, 3))
        self.assertEqual(spec.sweep.axis, "rate_p")
        self.assertEqual(spec.sweep.points(), [1.0, 2.0])
        self.assertEqual(spec.params["power_dbm"], 20)
        spec = registry.build_spec("fig5", scenario, trials=10, seed=4)
        self.assertEqual((spec.trials, spec.seed), (10, 4))

    def test_defaults_are_not_mutated(self):
        scenario = load_scenario(overrides={"experiments": {"fig4b": {"params": {"distances": [50, 60]}}}})
        registry.build_spec("fig4b", scenario)
        self.assertEqual(registry.build_spec("fig4b", load_scenario()).params["distances"], [100.0, 200.0, 300.0, 400.0])


class TestExecute(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.TemporaryDirectory()
        self.out = self.temp_dir.name

    def tearDown(self):
        self.temp_dir.cleanup()

    def test_dummy_runner(self):
        local = ExperimentRegistry()
        seen = []

        @local.register("demo", "a demo", params={"k": 1})
        def demo(spec, scenario):
            seen.append(spec)
            table = Table(("a",))
            table.add(spec.params["k"])
            return ExperimentOutput(tables={"values": table}, checks=[CurveCheck("demo", 0.0, True)])

        paths, checks = local.execute("demo", load_scenario(), self.out, trials=7, seed=2)
        self.assertEqual(paths, [os.path.join(self.out, "demo_values.csv")])
        self.assertEqual(read_csv(paths[0]), [{"a": "1"}])
        self.assertTrue(checks[0].passed)
        self.assertEqual((seen[0].trials, seen[0].seed), (7, 2))
        self.assertIsNone(seen[0].sweep)

    def test_admission_experiment(self):
        paths, checks = registry.execute("fig4b", load_scenario(), self.out, trials=2000, seed=1)
        rows = read_csv(paths[0])
        self.assertEqual(
            list(rows[0].keys()), ["scheme", "user", "distance_m", "admission", "ci_halfwidth", "trials", "seed"]
        )
        self.assertEqual(len(rows), 12)
        self.assertTrue(all(row["trials"] == "2000" for row in rows))
        self.assertEqual(len(checks), 3)

    def test_cpa_validation_experiment(self):
        scenario = load_scenario(
            overrides={"experiments": {"fig6a": {"sweep": {"start": 10, "stop": 10, "step": 5}, "params": {"pairs": [[1.0, 1.0]]}}}}
        )
        paths, checks = registry.execute("fig6a", scenario, self.out, trials=2000, seed=1)
        self.assertEqual(paths, [os.path.join(self.out, "fig6a_outage.csv")])
        rows = read_csv(paths[0])
        self.assertEqual(
            list(rows[0].keys()),
            ["scheme", "strategy", "power_dbm", "target_pair", "outage_mc", "ci_halfwidth",
             "outage_analytic", "outage_highsnr", "trials", "seed"],
        )
        self.assertEqual([row["scheme"] for row in rows], ["GUS", "CUS"])
        self.assertEqual(rows[0]["target_pair"], "1/1")
        self.assertTrue(all(0.0 <= float(row["outage_analytic"]) <= 1.0 for row in rows))
        self.assertEqual([check.curve_id for check in checks], ["GUS/CPA/1/1", "CUS/CPA/1/1", "CUS/CPA/1/1/upper-bound"])


class TestSecondaryFirstCheck(unittest.TestCase):
    def run_check(self, powers):
        scenario = load_scenario(
            overrides={"system": {"K": 3}, "experiments": {"slopes": {"params": {"secondary_first": {"powers": powers}}}}}
        )
        spec = registry.build_spec("slopes", scenario, trials=500, seed=4)
        table = Table(("curve", "expected", "slope", "passed"))
        check = _secondary_first_check(spec, scenario, scenario.system, table)
        return check, table.rows[-1]

    def test_fits_at_scenario_user_count(self):
        check, row = self.run_check([-20.0, -15.0])
        self.assertEqual(row[:2], ("GUS/CPA/secondary-first-mc", 3))
        self.assertTrue(math.isfinite(row[2]))
        self.assertFalse(check.insufficient)

    def test_unresolvable_powers(self):
        check, row = self.run_check([80.0, 90.0])
        self.assertTrue(check.insufficient)
        self.assertFalse(check.passed)
        self.assertEqual(check.compared, 0)
        self.assertTrue(math.isnan(row[2]))


if __name__ == "__main__":
    unittest.main()
