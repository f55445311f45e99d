import math
import unittest

import numpy as np

from rsma_outage.config import SystemConfig, target_sinr
from rsma_outage.context import context_for
from rsma_outage.exceptions import InvalidParameterError
from rsma_outage.montecarlo import estimate_outage
from rsma_outage.numerics import nu
from rsma_outage.outage import (
    cpa_breakpoints,
    cpa_cus_terms,
    curve_slope,
    diversity_slope,
    fpa_breakpoints,
    gus_cpa_case,
    outage_cpa_cus,
    outage_cpa_cus_bound,
    outage_cpa_gus,
    outage_cpa_gus_highsnr,
    outage_curve,
    outage_fpa_cus,
    outage_fpa_gus,
    outage_fpa_gus_highsnr,
    series_constants,
)

HIGH_SNR_POWERS = (35.0, 37.5, 40.0, 42.5, 45.0)


class TestGuards(unittest.TestCase):
    def setUp(self):
        self.cfg = SystemConfig()
        self.rho = self.cfg.transmit_snr(10.0)

    def test_zero_target_never_outages(self):
        self.assertEqual(outage_cpa_gus(self.cfg, self.rho, 1.0, 0.0), 0.0)
        self.assertEqual(outage_cpa_gus_highsnr(self.cfg, self.rho, 1.0, 0.0), 0.0)
        self.assertEqual(outage_fpa_gus(self.cfg, self.rho, 0.0, "first"), 0.0)
        self.assertEqual(outage_cpa_cus(self.cfg, self.rho, 1.0, 0.0), 0.0)
        self.assertEqual(outage_fpa_cus(self.cfg, self.rho, 0.0, "largest_cdf"), 0.0)

    def test_non_positive_snr(self):
        for rho in (0.0, -1.0):
            with self.assertRaises(InvalidParameterError):
                outage_cpa_gus(self.cfg, rho, 1.0, 1.0)
            with self.assertRaises(InvalidParameterError):
                outage_cpa_cus(self.cfg, rho, 1.0, 1.0)

    def test_negative_rate(self):
        with self.assertRaises(InvalidParameterError):
            outage_fpa_gus(self.cfg, self.rho, -1.0, "first")

    def test_unknown_method_and_role(self):
        with self.assertRaises(InvalidParameterError):
            outage_cpa_gus(self.cfg, self.rho, 1.0, 1.0, method="trapezoid")
        with self.assertRaises(InvalidParameterError):
            outage_fpa_gus(self.cfg, self.rho, 1.0, "third")
        with self.assertRaises(InvalidParameterError):
            outage_fpa_cus(self.cfg, self.rho, 1.0, "first")


class TestBreakpoints(unittest.TestCase):
    def setUp(self):
        self.cfg = SystemConfig()
        self.rho = 1e10

    def test_gus_cpa_case(self):
        self.assertEqual(gus_cpa_case(1.0, 1.0), 1)
        self.assertEqual(gus_cpa_case(3.0, 2.0), 1)
        self.assertEqual(gus_cpa_case(2.0, 0.5), 2)
        self.assertEqual(gus_cpa_case(0.5, 0.5), 3)

    def test_cpa_breakpoints(self):
        bp = cpa_breakpoints(self.cfg, self.rho, 1.0, 1.0)
        tau = 1.0 / self.rho
        self.assertAlmostEqual(bp.c, 3.0 * tau)
        self.assertAlmostEqual(bp.upper, 2.0 * tau)
        self.assertAlmostEqual(bp.eps2, 1.5 * tau)
        self.assertLess(bp.eps1, bp.eps2)
        self.assertLess(bp.eps2, bp.eps3)
        # gamma_s = 1 leaves x = y - 1/rho without a crossing of the diagonal
        self.assertIsNone(bp.eps5)
        self.assertIsNone(bp.eps6)
        self.assertAlmostEqual(bp.m_i1, 1.5 * tau)

    def test_cpa_breakpoints_low_secondary_target(self):
        bp = cpa_breakpoints(self.cfg, self.rho, 1.0, 0.5)
        gamma_s = target_sinr(0.5)
        tau_s = gamma_s / self.rho
        self.assertAlmostEqual(bp.eps5, tau_s / (1.0 - gamma_s))
        self.assertLessEqual(bp.m_i2, bp.m_i1)

    def test_fpa_breakpoints(self):
        bp = fpa_breakpoints(self.cfg, self.rho, 1.0)
        tau = 1.0 / self.rho
        self.assertAlmostEqual(bp.c, 3.0 * tau)
        self.assertAlmostEqual(bp.upper, 2.0 * tau)
        self.assertIsNone(bp.eps10)
        self.assertGreater(bp.eps11, 0.0)


class TestGusClosedForms(unittest.TestCase):
    def setUp(self):
        self.cfg = SystemConfig()
        self.ctx = context_for(self.cfg)

    def test_series_matches_quadrature(self):
        for power in (0.0, 10.0):
            rho = self.cfg.transmit_snr(power)
            for args in ((1.0, 1.0), (1.0, 0.5), (0.5, 0.5)):
                auto = outage_cpa_gus(self.cfg, rho, *args, ctx=self.ctx)
                quadrature = outage_cpa_gus(self.cfg, rho, *args, ctx=self.ctx, method="quadrature")
                self.assertAlmostEqual(auto, quadrature, delta=1e-2 * quadrature)
            for which in ("first", "second"):
                auto = outage_fpa_gus(self.cfg, rho, 1.0, which, ctx=self.ctx)
                quadrature = outage_fpa_gus(self.cfg, rho, 1.0, which, ctx=self.ctx, method="quadrature")
                self.assertAlmostEqual(auto, quadrature, delta=1e-2 * quadrature)

    def test_high_snr_form_is_asymptotic(self):
        rho = self.cfg.transmit_snr(40.0)
        closed = outage_cpa_gus(self.cfg, rho, 1.0, 1.0, ctx=self.ctx)
        self.assertAlmostEqual(outage_cpa_gus_highsnr(self.cfg, rho, 1.0, 1.0, ctx=self.ctx) / closed, 1.0, delta=0.05)
        for which in ("first", "second"):
            closed = outage_fpa_gus(self.cfg, rho, 1.0, which, ctx=self.ctx)
            ratio = outage_fpa_gus_highsnr(self.cfg, rho, 1.0, which, ctx=self.ctx) / closed
            self.assertAlmostEqual(ratio, 1.0, delta=0.05)

    def test_non_increasing_in_power(self):
        values = [value for _, value in outage_curve(outage_cpa_gus, self.cfg, (0.0, 10.0, 20.0, 30.0), 1.0, 1.0)]
        self.assertTrue(all(0.0 <= value <= 1.0 for value in values))
        self.assertTrue(np.all(np.diff(values) <= 0))

    def test_stronger_user_outages_less(self):
        for power in (0.0, 10.0, 20.0):
            rho = self.cfg.transmit_snr(power)
            first = outage_fpa_gus(self.cfg, rho, 1.0, "first", ctx=self.ctx)
            second = outage_fpa_gus(self.cfg, rho, 1.0, "second", ctx=self.ctx)
            self.assertLessEqual(first, second)

    def test_diversity_orders(self):
        K = self.cfg.K
        cases = (
            (K - 1, outage_cpa_gus, (1.0, 1.0)),
            (K - 1, outage_cpa_gus_highsnr, (1.0, 1.0)),
            (K, outage_fpa_gus, (1.0, "first")),
            (K - 1, outage_fpa_gus, (1.0, "second")),
        )
        for expected, fn, args in cases:
            slope = curve_slope(self.cfg, outage_curve(fn, self.cfg, HIGH_SNR_POWERS, *args))
            self.assertAlmostEqual(slope, expected, delta=0.3)


class TestSeriesConstants(unittest.TestCase):
    def setUp(self):
        self.cfg = SystemConfig()
        self.ctx = context_for(self.cfg)
        self.constants = series_constants(self.ctx)

    def test_decay_rates_are_positive(self):
        self.assertTrue(np.all(self.constants.Delta2 > 0))
        self.assertTrue(np.all(self.constants.chi5 > 0))
        self.assertTrue(np.all(self.constants.Delta3(target_sinr(0.5)) > 0))
        self.assertTrue(np.all(self.constants.chi4(target_sinr(1.0)) > 0))

    def test_table_shapes(self):
        terms = (len(self.constants.cdf), len(self.ctx.mu), len(self.constants.Xi_Km2))
        self.assertEqual(self.constants.Delta1.shape, terms)
        self.assertEqual(self.constants.Delta2.shape, terms)
        self.assertEqual(self.constants.chi3.shape, (len(self.constants.Xi_Km1), len(self.ctx.mu)))

    def test_strong_secondary_target_written_out(self):
        # gamma_s >= 1: head plus K(K-1) int_tau^m [F(c - x) - F(x)] f(x) F(x)^(K-2) dx
        K = self.cfg.K
        rho = self.cfg.transmit_snr(0.0)
        gamma_p, gamma_s = target_sinr(1.0), target_sinr(1.5)
        self.assertEqual(gus_cpa_case(gamma_p, gamma_s), 1)
        tau_p, tau_s = gamma_p / rho, gamma_s / rho
        c = tau_s + tau_p * (1.0 + gamma_s)
        m = min(tau_s * (1.0 + gamma_p), c / 2.0)

        consts = self.constants
        A, e = consts.cdf.coefficients, consts.cdf.exponents
        B = consts.Xi_Km2.coefficients
        weights = (self.ctx.Psi * self.ctx.mu)[None, :, None]
        coefficients = A[:, None, None] * weights * B[None, None, :]
        crossing = np.sum(coefficients * np.exp(-e * c)[:, None, None] * nu(consts.Delta1, tau_s, m))
        diagonal = np.sum(coefficients * nu(-consts.Delta2, tau_s, m))
        F = np.dot(self.ctx.Psi, 1.0 - np.exp(-self.ctx.mu * tau_s))
        head = K * F ** (K - 1) - (K - 1) * F**K
        expected = head + K * (K - 1) * (crossing - diagonal)

        self.assertGreater(expected, 0.0)
        for method in ("series", "closed"):
            value = outage_cpa_gus(self.cfg, rho, 1.0, 1.5, ctx=self.ctx, method=method)
            self.assertAlmostEqual(value, expected, delta=1e-9)

    def test_closed_matches_series(self):
        rho = self.cfg.transmit_snr(0.0)
        for args in ((1.0, 1.0), (2.0, 0.5), (0.5, 0.5)):
            closed = outage_cpa_gus(self.cfg, rho, *args, ctx=self.ctx, method="closed")
            self.assertAlmostEqual(closed, outage_cpa_gus(self.cfg, rho, *args, ctx=self.ctx, method="series"), delta=1e-9)
        for which in ("first", "second"):
            closed = outage_fpa_gus(self.cfg, rho, 1.0, which, ctx=self.ctx, method="closed")
            self.assertAlmostEqual(closed, outage_fpa_gus(self.cfg, rho, 1.0, which, ctx=self.ctx, method="series"), delta=1e-9)

    def test_closed_with_two_users(self):
        cfg = SystemConfig(K=2)
        ctx = context_for(cfg)
        rho = cfg.transmit_snr(0.0)
        closed = outage_cpa_gus(cfg, rho, 1.0, 0.5, ctx=ctx, method="closed")
        self.assertAlmostEqual(closed, outage_cpa_gus(cfg, rho, 1.0, 0.5, ctx=ctx, method="series"), delta=1e-9)


class TestGusCaseBoundaries(unittest.TestCase):
    def setUp(self):
        self.cfg = SystemConfig()
        self.ctx = context_for(self.cfg)
        self.rho = self.cfg.transmit_snr(10.0)

    def rate(self, gamma):
        return math.log2(1.0 + gamma)

    def assertContinuous(self, below, above, cases):
        values = []
        for (gamma_p, gamma_s), case in zip((below, above), cases):
            self.assertEqual(gus_cpa_case(gamma_p, gamma_s), case)
            values.append(outage_cpa_gus(self.cfg, self.rho, self.rate(gamma_p), self.rate(gamma_s), ctx=self.ctx))
        self.assertGreater(values[0], 0.0)
        self.assertAlmostEqual(values[0], values[1], delta=1e-3)

    def test_secondary_sinr_of_one(self):
        self.assertContinuous((1.0, 1.0 - 1e-6), (1.0, 1.0 + 1e-6), (3, 1))

    def test_primary_sinr_threshold(self):
        gamma_s = 0.5
        threshold = gamma_s / (1.0 - gamma_s)
        self.assertContinuous((threshold - 1e-6, gamma_s), (threshold + 1e-6, gamma_s), (3, 2))

    def test_coinciding_targets_at_high_snr(self):
        for power in (40.0, 45.0):
            rho = self.cfg.transmit_snr(power)
            ratio = outage_cpa_gus(self.cfg, rho, 1.5, 0.5, ctx=self.ctx) / outage_cpa_gus(self.cfg, rho, 0.8, 0.5, ctx=self.ctx)
            self.assertAlmostEqual(ratio, 1.0, delta=0.02)


class TestCusClosedForms(unittest.TestCase):
    def setUp(self):
        self.cfg = SystemConfig()
        self.ctx = context_for(self.cfg)

    def test_below_bound(self):
        for power in (0.0, 10.0, 20.0):
            rho = self.cfg.transmit_snr(power)
            value = outage_cpa_cus(self.cfg, rho, 1.0, 1.0, ctx=self.ctx)
            self.assertLessEqual(value, outage_cpa_cus_bound(self.cfg, rho, 1.0, 1.0, ctx=self.ctx) + 1e-3)

    def test_terms_are_consistent(self):
        rho = self.cfg.transmit_snr(10.0)
        terms = cpa_cus_terms(self.cfg, rho, 1.0, 1.0, self.ctx)
        self.assertGreaterEqual(terms.head, 0.0)
        self.assertAlmostEqual(outage_cpa_cus(self.cfg, rho, 1.0, 1.0, ctx=self.ctx), terms.value, places=12)

    def test_second_cdf_user_reuses_cpa(self):
        rho = self.cfg.transmit_snr(10.0)
        self.assertEqual(
            outage_fpa_cus(self.cfg, rho, 1.0, "second_cdf", ctx=self.ctx),
            outage_cpa_cus(self.cfg, rho, 1.0, 1.0, ctx=self.ctx),
        )

    def test_small_disc_has_no_negative_term(self):
        cfg = SystemConfig().with_geometry(R=1.2, alpha=3.0)
        terms = cpa_cus_terms(cfg, cfg.transmit_snr(10.0), 1.0, 2.0)
        self.assertEqual(terms.negative, 0.0)

    def test_target_above_disc_path_loss(self):
        # R^alpha < gamma moves eps9 inside the integration range
        cfg = SystemConfig().with_geometry(R=1.2, alpha=3.0)
        ctx = context_for(cfg)
        rho = 10.0
        values = []
        for factor, inside in ((1.0 - 1e-6, False), (1.0 + 1e-6, True)):
            rate = math.log2(1.0 + factor * cfg.R_alpha)
            bp = fpa_breakpoints(cfg, rho, rate)
            self.assertEqual(bp.eps9 < bp.upper, inside)
            value = outage_fpa_cus(cfg, rho, rate, "largest_cdf", ctx=ctx)
            self.assertTrue(0.0 < value < 1.0)
            values.append(value)
        self.assertAlmostEqual(values[0], values[1], delta=1e-3)

    def test_diversity_orders(self):
        K = self.cfg.K
        cases = (
            (K - 1, outage_cpa_cus, (1.0, 1.0)),
            (K, outage_fpa_cus, (1.0, "largest_cdf")),
        )
        for expected, fn, args in cases:
            slope = curve_slope(self.cfg, outage_curve(fn, self.cfg, HIGH_SNR_POWERS, *args))
            self.assertAlmostEqual(slope, expected, delta=0.3)


class TestDiversitySlope(unittest.TestCase):
    def test_power_law(self):
        rho = np.geomspace(1e3, 1e6, 5)
        self.assertAlmostEqual(diversity_slope(list(zip(rho, rho**-3.0))), 3.0, places=10)

    def test_curve_slope_uses_transmit_snr(self):
        cfg = SystemConfig()
        curve = [(power, cfg.transmit_snr(power) ** -2.0) for power in (10.0, 20.0, 30.0)]
        self.assertAlmostEqual(curve_slope(cfg, curve), 2.0, places=10)

    def test_rejects_bad_points(self):
        with self.assertRaises(InvalidParameterError):
            diversity_slope([(1.0, 0.5)])
        with self.assertRaises(InvalidParameterError):
            diversity_slope([(1.0, 0.5), (10.0, 0.0)])
        with self.assertRaises(InvalidParameterError):
            diversity_slope([(10.0, 0.5), (1.0, 0.1)])


class TestAgainstSimulation(unittest.TestCase):
    """Closed forms against 40k simulated slots."""

    TRIALS = 40_000

    def setUp(self):
        self.cfg = SystemConfig().with_power(0.0)
        self.ctx = context_for(self.cfg)

    def assertAgrees(self, estimate, analytic):
        self.assertAlmostEqual(estimate.estimate, analytic, delta=0.15 * analytic + 3.0 * (estimate.half_width or 0.0) + 2e-3)

    def test_gus_cpa(self):
        estimate = estimate_outage(self.cfg, "GUS", "CPA", trials=self.TRIALS, seed=3)["secondary"]
        self.assertAgrees(estimate, outage_cpa_gus(self.cfg, self.cfg.rho_m, 1.0, 1.0, ctx=self.ctx))

    def test_gus_fpa(self):
        estimates = estimate_outage(self.cfg, "GUS", "FPA", trials=self.TRIALS, seed=4)
        for which in ("first", "second"):
            self.assertAgrees(estimates[which], outage_fpa_gus(self.cfg, self.cfg.rho_m, 1.0, which, ctx=self.ctx))

    def test_cus_cpa(self):
        estimate = estimate_outage(self.cfg, "CUS", "CPA", trials=self.TRIALS, seed=5)["secondary"]
        self.assertAgrees(estimate, outage_cpa_cus(self.cfg, self.cfg.rho_m, 1.0, 1.0, ctx=self.ctx))

    def test_cus_fpa(self):
        estimates = estimate_outage(self.cfg, "CUS", "FPA", trials=self.TRIALS, seed=6)
        self.assertAgrees(estimates["first"], outage_fpa_cus(self.cfg, self.cfg.rho_m, 1.0, "largest_cdf", ctx=self.ctx))
        self.assertAgrees(estimates["second"], outage_fpa_cus(self.cfg, self.cfg.rho_m, 1.0, "second_cdf", ctx=self.ctx))

    def test_unequal_targets(self):
        analytic = {"GUS": outage_cpa_gus, "CUS": outage_cpa_cus}
        for seed, (rate_p, rate_s) in enumerate(((1.5, 0.5), (0.8, 0.5)), start=10):
            for power in (-5.0, 0.0):
                cfg = self.cfg.with_power(power).with_targets(rate_p=rate_p, rate_s=rate_s)
                for scheme, fn in analytic.items():
                    estimate = estimate_outage(cfg, scheme, "CPA", trials=self.TRIALS, seed=seed)["secondary"]
                    with self.subTest(scheme=scheme, targets=(rate_p, rate_s), power=power):
                        self.assertAgrees(estimate, fn(cfg, cfg.rho_m, rate_p, rate_s, ctx=self.ctx))

    def test_target_above_disc_path_loss(self):
        cfg = SystemConfig().with_geometry(R=1.2, alpha=3.0).with_power(-90.0)
        rate = math.log2(1.0 + 2.0 * cfg.R_alpha)
        cfg = cfg.with_targets(rate_i=rate, rate_j=rate)
        estimate = estimate_outage(cfg, "CUS", "FPA", trials=self.TRIALS, seed=7)["first"]
        self.assertAgrees(estimate, outage_fpa_cus(cfg, cfg.rho_m, rate, "largest_cdf"))


if __name__ == "__main__":
    unittest.main()
