import unittest
from itertools import combinations

import numpy as np

from rsma_outage.channel import ChannelRealization, sample_realization
from rsma_outage.config import SystemConfig
from rsma_outage.exceptions import InvalidParameterError
from rsma_outage.scheduling import Scheme, admission_histogram, select_cus, select_gus, select_pair, select_rus


def realization(gains, cdf_values=None):
    gains = np.asarray(gains, dtype=float)
    cdf_values = gains if cdf_values is None else np.asarray(cdf_values, dtype=float)
    return ChannelRealization(distances=np.zeros_like(gains), gains=gains, cdf_values=cdf_values)


class TestSelectors(unittest.TestCase):
    def test_gus_picks_two_largest_gains(self):
        pair = select_gus(realization([0.5, 0.2, 0.9, 0.1]))
        self.assertEqual((pair.first, pair.second), (2, 0))
        self.assertEqual((pair.gain_first, pair.gain_second), (0.9, 0.5))
        self.assertEqual(pair.scheme, Scheme.GUS)

    def test_gus_tie_break(self):
        pair = select_gus(realization([0.3, 0.3, 0.3, 0.3]))
        self.assertEqual((pair.first, pair.second), (0, 1))

    def test_cus_picks_two_largest_cdf_values(self):
        pair = select_cus(realization([0.5, 0.2, 0.9, 0.1], [0.1, 0.95, 0.4, 0.8]))
        self.assertEqual((pair.first, pair.second), (1, 3))
        self.assertEqual(pair.gain_second, 0.1)

    def test_cus_equals_gus_for_equal_distances(self):
        rng = np.random.default_rng(8)
        real = sample_realization(SystemConfig(), rng, size=200, distances=[250.0] * 4)
        gus, cus = select_gus(real), select_cus(real)
        np.testing.assert_array_equal(gus.first, cus.first)
        np.testing.assert_array_equal(gus.second, cus.second)

    def test_rus_two_users(self):
        pair = select_rus(realization([0.2, 0.7]), np.random.default_rng(1))
        self.assertEqual((pair.first, pair.second), (1, 0))

    def test_rus_is_deterministic_for_seed(self):
        real = sample_realization(SystemConfig(), np.random.default_rng(9), size=100)
        first = select_rus(real, np.random.default_rng(10))
        second = select_rus(real, np.random.default_rng(10))
        np.testing.assert_array_equal(first.first, second.first)
        np.testing.assert_array_equal(first.second, second.second)

    def test_rus_roles_follow_gain(self):
        real = sample_realization(SystemConfig(), np.random.default_rng(11), size=1000)
        pair = select_rus(real, np.random.default_rng(12))
        self.assertTrue(np.all(pair.gain_first >= pair.gain_second))

    def test_rus_pairs_are_uniform(self):
        trials = 60_000
        real = sample_realization(SystemConfig(), np.random.default_rng(13), size=trials)
        pair = select_rus(real, np.random.default_rng(14))
        low = np.minimum(pair.first, pair.second)
        high = np.maximum(pair.first, pair.second)
        expected = 1.0 / 6.0
        sigma = np.sqrt(expected * (1 - expected) / trials)
        for a, b in combinations(range(4), 2):
            frequency = np.mean((low == a) & (high == b))
            self.assertLess(abs(frequency - expected), 4 * sigma)

    def test_select_pair_dispatch(self):
        real = realization([0.5, 0.2, 0.9, 0.1])
        self.assertEqual(select_pair(real, "GUS").first, 2)
        with self.assertRaises(InvalidParameterError):
            select_pair(real, Scheme.RUS)
        with self.assertRaises(ValueError):
            select_pair(real, "XYZ")

    def test_single_user_rejected(self):
        with self.assertRaises(InvalidParameterError):
            select_gus(realization([0.5]))


class TestAdmissionHistogram(unittest.TestCase):
    def test_single_trial(self):
        pair = select_gus(realization([0.9, 0.8, 0.1, 0.2]))
        np.testing.assert_array_equal(admission_histogram([pair], 4), [1, 1, 0, 0])

    def test_sums_to_two(self):
        real = sample_realization(SystemConfig(), np.random.default_rng(15), size=500)
        histogram = admission_histogram(select_cus(real), 4)
        self.assertAlmostEqual(histogram.sum(), 2.0)

    def test_empty(self):
        with self.assertRaises(InvalidParameterError):
            admission_histogram([], 4)

    def test_gus_favours_near_users(self):
        real = sample_realization(SystemConfig(), np.random.default_rng(16), size=20_000, distances=[100, 200, 300, 400])
        histogram = admission_histogram(select_gus(real), 4)
        self.assertTrue(np.all(np.diff(histogram) < 0))

    def test_cus_admits_equally(self):
        real = sample_realization(SystemConfig(), np.random.default_rng(17), size=40_000, distances=[100, 200, 300, 400])
        histogram = admission_histogram(select_cus(real), 4)
        np.testing.assert_allclose(histogram, 0.5, atol=0.015)


if __name__ == "__main__":
    unittest.main()
