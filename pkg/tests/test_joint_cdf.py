import unittest

import numpy as np

from rsma_outage.config import SystemConfig
from rsma_outage.context import context_for
from rsma_outage.joint_cdf import (
    JointCdfCase,
    classify,
    joint_cdf,
    joint_cdf_dx,
    joint_cdf_dy,
    marginal_cdf_first,
    marginal_cdf_second,
)
from rsma_outage.montecarlo import sample_scheduled_gains
from rsma_outage.scheduling import Scheme


def central_difference(f, value, relative_step=1e-5):
    h = relative_step * value
    return (f(value + h) - f(value - h)) / (2 * h)


class TestClassify(unittest.TestCase):
    def test_regions(self):
        R_alpha = 9.0
        self.assertEqual(classify(10.0, 1.0, R_alpha), JointCdfCase.FAR_ABOVE)
        self.assertEqual(classify(5.0, 1.0, R_alpha), JointCdfCase.ABOVE)
        self.assertEqual(classify(1.0, 5.0, R_alpha), JointCdfCase.BELOW)
        self.assertEqual(classify(1.0, 10.0, R_alpha), JointCdfCase.FAR_BELOW)

    def test_boundaries_belong_to_lower_case(self):
        self.assertEqual(classify(1.0, 1.0, 9.0), JointCdfCase.ABOVE)
        self.assertEqual(classify(10.0, 1.0, 9.0), JointCdfCase.FAR_ABOVE)


class TestJointCdf(unittest.TestCase):
    def setUp(self):
        self.cfg = SystemConfig()
        self.ctx = context_for(self.cfg)
        self.R1 = self.cfg.R_alpha + 1.0

    def test_zero_arguments(self):
        self.assertEqual(joint_cdf(0.0, 1e-9, self.ctx), 0.0)
        self.assertEqual(joint_cdf(1e-9, 0.0, self.ctx), 0.0)
        self.assertEqual(marginal_cdf_second(0.0, self.ctx), 0.0)

    def test_large_y_reduces_to_first_marginal(self):
        x = 1e-8
        self.assertAlmostEqual(joint_cdf(x, 1e3, self.ctx), marginal_cdf_first(x, self.ctx), delta=1e-6)

    def test_large_x_reduces_to_second_marginal(self):
        y = 1e-9
        self.assertAlmostEqual(joint_cdf(1e3, y, self.ctx), marginal_cdf_second(y, self.ctx), delta=1e-4)

    def test_marginals_reach_one(self):
        self.assertAlmostEqual(marginal_cdf_second(1e3, self.ctx), 1.0, delta=1e-6)
        self.assertAlmostEqual(marginal_cdf_first(1e3, self.ctx), 1.0, delta=1e-6)

    def test_monotone_on_grid(self):
        grid = np.geomspace(1e-12, 1e-6, 7)
        values = np.array([[joint_cdf(x, y, self.ctx) for y in grid] for x in grid])
        self.assertTrue(np.all(values >= 0) and np.all(values <= 1))
        self.assertTrue(np.all(np.diff(values, axis=0) >= -1e-4))
        self.assertTrue(np.all(np.diff(values, axis=1) >= -1e-4))

    def test_dy_vanishes_far_below(self):
        x = 1e-10
        self.assertEqual(joint_cdf_dy(x, 2.0 * self.R1 * x, self.ctx), 0.0)

    def test_dy_matches_finite_difference(self):
        for x, y in ((2e-9, 1e-9), (1e-9, 2e-9), (5e-10, 3e-9)):
            self.assertNotEqual(classify(x, y, self.cfg.R_alpha), JointCdfCase.FAR_BELOW)
            expected = central_difference(lambda v: joint_cdf(x, v, self.ctx), y)
            self.assertAlmostEqual(joint_cdf_dy(x, y, self.ctx), expected, delta=1e-4 * abs(expected) + 1e-6 / y)

    def test_dx_matches_finite_difference(self):
        points = ((2e-9, 1e-9), (1e-9, 2e-9), (2.0 * self.R1 * 5e-11, 5e-11))
        for x, y in points:
            expected = central_difference(lambda v: joint_cdf(v, y, self.ctx), x)
            self.assertAlmostEqual(joint_cdf_dx(x, y, self.ctx), expected, delta=1e-4 * abs(expected) + 1e-6 / x)

    def test_partials_non_negative(self):
        rng = np.random.default_rng(21)
        for x, y in 10.0 ** rng.uniform(-11, -7, size=(30, 2)):
            self.assertGreaterEqual(joint_cdf_dx(x, y, self.ctx), -1e-3 / x)
            self.assertGreaterEqual(joint_cdf_dy(x, y, self.ctx), -1e-3 / y)

    def test_partials_at_zero(self):
        self.assertEqual(joint_cdf_dx(1e-9, 0.0, self.ctx), 0.0)
        self.assertEqual(joint_cdf_dy(0.0, 1e-9, self.ctx), 0.0)


class TestJointCdfAgainstSimulation(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.cfg = SystemConfig()
        cls.ctx = context_for(cls.cfg)
        cls.X, cls.Y = sample_scheduled_gains(cls.cfg, Scheme.CUS, trials=100_000, seed=99)

    def test_joint_grid(self):
        R1 = self.cfg.R_alpha + 1.0
        for y in np.quantile(self.Y, [0.2, 0.5, 0.8]):
            for multiplier in (2.0 * R1, 1.5, 1.0, 0.5, 1.0 / (2.0 * R1)):
                x = multiplier * y
                empirical = np.mean((self.X < x) & (self.Y < y))
                self.assertAlmostEqual(joint_cdf(x, y, self.ctx), empirical, delta=0.02)

    def test_second_marginal(self):
        for y in np.quantile(self.Y, np.linspace(0.05, 0.95, 10)):
            self.assertAlmostEqual(marginal_cdf_second(y, self.ctx), np.mean(self.Y < y), delta=0.015)


if __name__ == "__main__":
    unittest.main()
