import math

import numpy as np
from django.test import SimpleTestCase

from approx.cli import synth_noise
from approx.exceptions import ConfigurationError, DomainError
from approx.fixtures import PERIODIC
from approx.stablediff import (
    AdversarialFunction,
    SampledSignal,
    SmoothnessClass,
    adversarial_pair,
    bound_at,
    central_difference,
    central_difference_grid,
    differentiate,
    error_bound,
    lower_bound_check,
    minimax_error,
    nonexistence_gap,
    optimal_step,
    sharpness_check,
)


class StepSelectionTests(SimpleTestCase):
    def test_second_order_step_and_bound(self):
        cls = SmoothnessClass(2, 1.0)
        self.assertAlmostEqual(optimal_step(1e-4, cls), math.sqrt(2e-4), places=15)
        self.assertAlmostEqual(error_bound(1e-4, cls), 0.01414213562373095, places=15)

    def test_bound_is_smallest_at_ideal_step(self):
        cls = SmoothnessClass(1.5, 2.0)
        h = optimal_step(1e-3, cls)
        best = bound_at(h, 1e-3, cls)
        self.assertAlmostEqual(best, error_bound(1e-3, cls), places=12)
        for factor in (0.5, 0.9, 1.1, 2.0):
            self.assertGreater(bound_at(factor * h, 1e-3, cls), best)

    def test_closed_forms_at_unit_noise(self):
        cls = SmoothnessClass(1.5, 1.0)
        self.assertAlmostEqual(optimal_step(1.0, cls), 2 ** (2 / 3), places=14)
        self.assertAlmostEqual(error_bound(1.0, cls), 1.5 * 2 ** (1 / 3), places=14)
        self.assertAlmostEqual(error_bound(1.0, cls), 1.8899, places=4)
        self.assertEqual(optimal_step(0.5, SmoothnessClass(2, 1.0)), 1.0)

    def test_ideal_step_on_the_grid_has_no_slack(self):
        signal = SampledSignal(np.zeros(100), x0=0.0, dx=0.05, period=5.0, delta=0.02)
        report = differentiate(signal, SmoothnessClass(2, 1.0))
        self.assertEqual(report.h_used, 0.2)
        self.assertEqual(report.steps, 4)
        self.assertAlmostEqual(report.snapping_slack, 0.0, places=15)

    def test_rejects_classes_without_stable_estimator(self):
        for j in (0.5, 1.0, 2.5):
            with self.assertRaises(DomainError):
                SmoothnessClass(j, 1.0)
        with self.assertRaises(DomainError):
            SmoothnessClass(2, 0.0)

    def test_zero_noise_has_no_ideal_step(self):
        signal = SampledSignal.from_function(np.sin, 64)
        with self.assertRaises(DomainError):
            differentiate(signal, SmoothnessClass(2, 1.0))


class DifferentiateTests(SimpleTestCase):
    def test_alternating_noise_within_bound(self):
        clean = SampledSignal.from_function(np.sin, 4096)
        noisy = synth_noise(clean, 1e-4, pattern="alternating")
        report = differentiate(noisy, SmoothnessClass(2, 1.0))
        error = np.max(np.abs(report.derivative - np.cos(clean.grid)))
        self.assertLessEqual(error, report.bound)
        self.assertAlmostEqual(report.bound, math.sqrt(2e-4) + report.snapping_slack, places=12)
        self.assertEqual(report.h_used, report.steps * clean.dx)

    def test_uniform_draws_within_bound_for_builtins(self):
        for name, (f, fprime, m2) in PERIODIC.items():
            clean = SampledSignal.from_function(f, 2048)
            for seed in range(5):
                noisy = synth_noise(clean, 1e-3, seed=seed)
                report = differentiate(noisy, SmoothnessClass(2, m2))
                error = np.max(np.abs(report.derivative - fprime(clean.grid)))
                self.assertLessEqual(error, report.bound, msg=f"{name}, seed {seed}")

    def test_derivative_is_read_only(self):
        noisy = synth_noise(SampledSignal.from_function(np.sin, 256), 1e-3, pattern="alternating")
        report = differentiate(noisy, SmoothnessClass(2, 1.0))
        with self.assertRaises(ValueError):
            report.derivative[0] = 0.0

    def test_coarse_grid_is_refused(self):
        noisy = synth_noise(SampledSignal.from_function(np.sin, 8), 1e-8, pattern="alternating")
        with self.assertRaises(ConfigurationError):
            differentiate(noisy, SmoothnessClass(2, 1.0))

    def test_off_grid_step_and_point_are_refused(self):
        signal = SampledSignal.from_function(np.sin, 64)
        with self.assertRaises(DomainError):
            central_difference(signal, 0.0, 1.5 * signal.dx)
        with self.assertRaises(DomainError):
            central_difference(signal, 0.5 * signal.dx, signal.dx)

    def test_exact_on_affine_and_quadratic(self):
        dx = 0.25
        x = dx * np.arange(40)
        for f, fprime in ((lambda t: 1.5 - 2 * t, lambda t: -2.0), (lambda t: 3 * t * t - 2 * t + 1, lambda t: 6 * t - 2)):
            signal = SampledSignal(f(x), x0=0.0, dx=dx, period=10.0)
            for i in (5, 12, 30):
                for k in (1, 3):
                    self.assertAlmostEqual(central_difference(signal, x[i], k * dx), fprime(x[i]), places=12)

    def test_explicit_step_on_clean_data(self):
        signal = SampledSignal.from_function(np.sin, 1024)
        report = differentiate(signal, SmoothnessClass(2, 1.0), step=4 * signal.dx)
        h = 4 * signal.dx
        self.assertAlmostEqual(report.derivative[0], math.sin(h) / h, places=12)
        self.assertLessEqual(np.max(np.abs(report.derivative - np.cos(signal.grid))), h / 2)

    def test_period_must_match_samples(self):
        with self.assertRaises(DomainError):
            SampledSignal(np.zeros(10), x0=0.0, dx=0.1, period=2.0)


class NoiseTests(SimpleTestCase):
    def setUp(self):
        self.clean = SampledSignal.from_function(np.cos, 100)

    def test_alternating_ignores_seed(self):
        a = synth_noise(self.clean, 1e-2, seed=1, pattern="alternating")
        b = synth_noise(self.clean, 1e-2, seed=99, pattern="alternating")
        np.testing.assert_array_equal(a.values, b.values)
        np.testing.assert_allclose(a.values[:2] - self.clean.values[:2], [1e-2, -1e-2], rtol=0, atol=1e-15)

    def test_alternating_cancels_in_central_differences(self):
        noisy = synth_noise(self.clean, 1e-2, pattern="alternating")
        for k in (1, 2, 5):
            h = k * self.clean.dx
            np.testing.assert_allclose(
                central_difference_grid(noisy, h), central_difference_grid(self.clean, h), rtol=0, atol=1e-12
            )

    def test_uniform_is_reproducible_and_bounded(self):
        a = synth_noise(self.clean, 1e-2, seed=7)
        b = synth_noise(self.clean, 1e-2, seed=7)
        np.testing.assert_array_equal(a.values, b.values)
        self.assertLessEqual(np.max(np.abs(a.values - self.clean.values)), 1e-2)
        self.assertEqual(a.delta, 1e-2)

    def test_zero_delta_is_identity(self):
        np.testing.assert_array_equal(synth_noise(self.clean, 0.0, seed=3).values, self.clean.values)

    def test_negative_delta(self):
        with self.assertRaises(DomainError):
            synth_noise(self.clean, -1.0)


class AdversarialTests(SimpleTestCase):
    def test_pair_stays_within_noise_of_zero(self):
        m, delta = 2.0, 1e-4
        f1, f2, h = adversarial_pair(m, delta)
        x = np.linspace(-5 * h, 7 * h, 4001)
        self.assertAlmostEqual(np.max(np.abs(f1(x))), delta, places=15)
        np.testing.assert_allclose(f2(x), -f1(x))
        self.assertAlmostEqual(float(f1.derivative(0.0)), m * h, places=15)

    def test_unit_noise_peak(self):
        f1, _, h = adversarial_pair(1.0, 0.5)
        self.assertEqual(h, 1.0)
        self.assertEqual(float(f1(1.0)), 0.5)
        self.assertEqual(float(f1.derivative(1.0)), 0.0)

    def test_continuation_is_continuously_differentiable(self):
        f = AdversarialFunction(1.0, 0.5)
        for knot in (-0.5, 0.0, 1.0, 1.5):
            below, above = knot - 1e-9, knot + 1e-9
            self.assertAlmostEqual(float(f(below)), float(f(above)), places=8)
            self.assertAlmostEqual(float(f.derivative(below)), float(f.derivative(above)), places=8)

    def test_shape_is_preserved(self):
        f = AdversarialFunction(1.0, 0.5)
        self.assertEqual(f(np.zeros((3, 2))).shape, (3, 2))
        self.assertEqual(np.shape(f(0.0)), ())

    def test_sharpness(self):
        report = sharpness_check(1.0, 1e-4)
        self.assertTrue(report.attained)
        self.assertEqual(report.estimate, 0.0)
        self.assertAlmostEqual(report.minimax, math.sqrt(2e-4), places=15)
        self.assertLessEqual(max(report.data_distance), 1e-4 * (1 + 1e-12))

    def test_no_estimate_beats_minimax(self):
        gamma = minimax_error(1.0, 1e-4)
        self.assertAlmostEqual(lower_bound_check(0.0, 1.0, 1e-4), gamma, places=15)
        for b in np.random.default_rng(0).uniform(-1, 1, 1000):
            self.assertGreaterEqual(lower_bound_check(float(b), 1.0, 1e-4), gamma * (1 - 1e-12))

    def test_nonexistence_gap(self):
        self.assertEqual(nonexistence_gap(3.0, 1e-6, 1), 3.0)
        self.assertGreater(nonexistence_gap(1e6, 1e-4, 0), nonexistence_gap(1.0, 1e-4, 0))
        with self.assertRaises(DomainError):
            nonexistence_gap(1.0, 1e-4, 2)
