import math

import numpy as np
from django.conf import settings
from django.test import SimpleTestCase, override_settings

from approx.exceptions import ConfigurationError, GeometryError, IllConditionedError, TruncationError
from approx.fixtures import c1_bump, c1_bump_transform
from approx.specext import (
    CompactFunction,
    DeltaSeqConfig,
    SpectralSamples,
    SpectralWindow,
    bisector_center,
    bump_laplacian,
    bump_profile,
    convolution_ladder,
    convolve,
    default_config,
    delta_kernel,
    delta_kernel_spectrum,
    delta_sequence_check,
    error_ladder,
    extrapolate,
    fit_mollifier,
    fit_rate,
    forward_transform,
    is_nonincreasing,
    make_mollifier,
    pj,
    sample_spectrum,
    window_from_spec,
)

BUMP_INTEGRAL = 0.4439938161680794


class WindowTests(SimpleTestCase):
    def test_rules_integrate_volume(self):
        windows = [
            SpectralWindow.interval(-1.0, 2.0),
            SpectralWindow.box((-1.0, 0.0), (1.0, 3.0)),
            SpectralWindow.ball((0.5, 0.0), 2.0),
            SpectralWindow.truncated_cone(math.radians(30), math.radians(150), 3.0),
        ]
        for window in windows:
            self.assertAlmostEqual(window.weights.sum() / window.volume, 1.0, places=10, msg=window.shape)
            self.assertTrue(np.all(window.contains(window.nodes)))
        self.assertAlmostEqual(windows[-1].volume, math.radians(120) * 9.0)

    def test_parse_window(self):
        self.assertEqual(window_from_spec("interval:-2:3").params["hi"], 3.0)
        self.assertEqual(window_from_spec("ball:0,0:1.5", dim=2).params["radius"], 1.5)
        self.assertEqual(window_from_spec("box:-1,-1:1,2", dim=2).params["hi"], (1.0, 2.0))
        cone = window_from_spec("cone:30:150:3", dim=2)
        self.assertAlmostEqual(cone.params["alpha_max"], math.radians(150))
        for bad in ("interval:1", "ball:0,0:1", "disc:0:1", "interval:a:b"):
            with self.assertRaises(ConfigurationError, msg=bad):
                window_from_spec(bad)

    def test_sector_width_must_be_proper(self):
        with self.assertRaises(ConfigurationError):
            SpectralWindow.truncated_cone(0.0, math.pi, 3.0)

    def test_rebuilt_from_params(self):
        window = SpectralWindow.truncated_cone(0.5, 2.0, 4.0, count=12, rule="midpoint")
        again = SpectralWindow.from_params(2, window.shape, window.params)
        np.testing.assert_array_equal(window.nodes, again.nodes)

    def test_cone_holds_ball_on_bisector_only_away_from_apex(self):
        lo, hi = math.radians(30), math.radians(150)
        cone = SpectralWindow.truncated_cone(lo, hi, 3.0)
        center = bisector_center(lo, hi, 1.0)
        self.assertAlmostEqual(np.hypot(*center), 1.02 / math.sin(math.radians(60)))
        self.assertTrue(cone.contains_ball(center, 1.0))
        self.assertTrue(cone.contains_ball(-center, 1.0))
        self.assertFalse(cone.contains_ball(0.5 * center, 1.0))
        self.assertFalse(cone.contains_ball((1.5, 0.0), 0.1))


class MollifierTests(SimpleTestCase):
    def test_normalized(self):
        for dim in (1, 2):
            cfg = default_config(4, dim=dim)
            self.assertAlmostEqual(cfg.mollifier.integral(), 1.0, delta=1e-8)
        constant = default_config(4).mollifier.norm_const
        self.assertAlmostEqual(constant * BUMP_INTEGRAL, 2 * math.pi, delta=1e-6)

    def test_ball_must_fit(self):
        window = SpectralWindow.interval(-1.0, 1.0)
        with self.assertRaises(GeometryError):
            make_mollifier(window, 0.5, 1.0)
        fitted = fit_mollifier(SpectralWindow.interval(0.0, 4.0))
        self.assertEqual((float(fitted.center[0]), fitted.radius), (2.0, 2.0))

    def test_profile_vanishes_outside(self):
        np.testing.assert_array_equal(bump_profile([1.0, 1.5]), [0.0, 0.0])
        self.assertAlmostEqual(float(bump_profile(0.0)), math.exp(-1))

    def test_laplacian_matches_finite_differences(self):
        def profile(u):
            return bump_profile(np.sum(np.atleast_2d(u) ** 2, axis=1))

        step = 1e-4
        u = 0.3
        second = (profile([[u + step]]) - 2 * profile([[u]]) + profile([[u - step]])) / step ** 2
        self.assertAlmostEqual(float(bump_laplacian(1, 1, u * u)), float(second[0]), places=5)

        p = np.array([0.2, 0.1])
        stencil = sum(
            profile(p + step * e) + profile(p - step * e) for e in np.eye(2)
        ) - 4 * profile(p)
        self.assertAlmostEqual(float(bump_laplacian(2, 1, p @ p)), float(stencil[0]) / step ** 2, places=5)


class KernelTests(SimpleTestCase):
    def test_polynomial_weight(self):
        a1 = 1.25
        r = np.linspace(0, 4 * a1 ** 2, 200)
        values = pj(r, 8, a1, 1)
        self.assertTrue(np.all(values >= 0))
        self.assertTrue(np.all(np.diff(values) <= 0))
        self.assertEqual(values[-1], 0.0)
        self.assertAlmostEqual(float(pj(0.0, 1, 1.0, 1)), 0.28209479177387814, places=14)
        self.assertAlmostEqual(float(pj(2.0, 2, 1.0, 2)), 1 / (8 * math.pi), places=14)

    def test_kernel_at_origin_and_symmetry(self):
        cfg = default_config(4)
        values = delta_kernel(np.array([0.0, 0.3, -0.3]), cfg)
        self.assertAlmostEqual(values[0].real, float(pj(0.0, 4, cfg.a1, 1)), delta=1e-7)
        self.assertLess(np.max(np.abs(values.imag)), 1e-10)
        self.assertAlmostEqual(values[1].real, values[2].real, places=10)

    def test_config_validation(self):
        mollifier = default_config(1).mollifier
        with self.assertRaises(ConfigurationError):
            DeltaSeqConfig.build(2, 1.0, mollifier, a1=1.0)
        with self.assertRaises(ConfigurationError):
            DeltaSeqConfig.build(2, 1.0, mollifier, truncation_radius=4.0)
        with self.assertRaises(ConfigurationError):
            DeltaSeqConfig.build(2.5, 1.0, mollifier)
        with self.assertRaises(ConfigurationError):
            DeltaSeqConfig.build(2, 1.0, mollifier, spectrum_method="fft")
        cfg = DeltaSeqConfig.build(2, 1.0, mollifier)
        self.assertEqual((cfg.a1, cfg.truncation_radius), (1.25, 10.0))

    def test_short_truncation_is_not_certified(self):
        cfg = DeltaSeqConfig.build(2, 1.0, default_config(1).mollifier, spectrum_method="quadrature")
        with self.assertRaises(TruncationError) as ctx:
            delta_kernel_spectrum(np.array([0.0, 0.5]), cfg)
        self.assertEqual(ctx.exception.suggested_radius, 15.0)
        self.assertEqual(ctx.exception.exit_code, 2)

    @override_settings(APPROX={**settings.APPROX, "WINDOW_PANELS": 256, "SPATIAL_PANELS": 512})
    def test_spectrum_methods_agree(self):
        window = SpectralWindow.interval(-60.0, 60.0)
        mollifier = fit_mollifier(window)
        xi = np.random.default_rng(1).uniform(-48, 48, 25)
        for j in (1, 2, 4):
            exact = delta_kernel_spectrum(xi, DeltaSeqConfig.build(j, 1.0, mollifier))
            cfg = DeltaSeqConfig.build(j, 1.0, mollifier, truncation_radius=12.0, spectrum_method="quadrature")
            numeric = delta_kernel_spectrum(xi, cfg)
            scale = np.max(np.abs(exact))
            self.assertLessEqual(np.max(np.abs(numeric - exact)), 1e-4 * scale, msg=f"j={j}")


class ExtrapolationTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.f = CompactFunction.sample(c1_bump(1.0), 1.0, n=4001)
        cls.cfg = default_config(2)
        cls.samples = sample_spectrum(c1_bump_transform(1.0, 1), cls.cfg.window)

    def test_bump_transform(self):
        transform = c1_bump_transform(1.0, 1)
        self.assertAlmostEqual(complex(transform(0.0)[0]).real, 16 / 15, places=14)
        below, above = transform(np.array([[0.1 - 1e-12], [0.1 + 1e-12]]))
        self.assertAlmostEqual(below.real, above.real, places=9)
        xi = np.array([0.0, 0.7, 3.0, 9.5])
        np.testing.assert_allclose(forward_transform(self.f, xi), transform(xi[:, None]), rtol=0, atol=1e-5)
        self.assertAlmostEqual(complex(c1_bump_transform(1.0, 2)(np.zeros(2))[0]).real, math.pi / 3, places=12)

    def test_convolution_identity(self):
        stride = slice(None, None, 100)
        spatial = convolve(self.f, self.cfg)[stride]
        spectral = extrapolate(self.samples, self.cfg, self.f.axis[stride])
        np.testing.assert_allclose(spectral.values, spatial, rtol=0, atol=1e-5)
        self.assertLess(spectral.max_imag, 1e-8)

    def test_zero_spectrum_gives_zero(self):
        zero = SpectralSamples(self.cfg.window, np.zeros(len(self.cfg.window.nodes)))
        result = extrapolate(zero, self.cfg, np.linspace(-1, 1, 11))
        np.testing.assert_array_equal(result.values, np.zeros(11))

    def test_samples_must_sit_on_window_nodes(self):
        other = sample_spectrum(c1_bump_transform(1.0, 1), SpectralWindow.interval(-2.0, 2.0))
        with self.assertRaises(ConfigurationError):
            extrapolate(other, self.cfg, [0.0])

    def test_large_j_is_refused(self):
        with self.assertRaises(IllConditionedError) as ctx:
            extrapolate(self.samples, self.cfg.with_j(64), [0.0])
        self.assertGreater(ctx.exception.amplification, settings.APPROX["MAX_AMPLIFICATION"])

    def test_delta_sequence(self):
        report = delta_sequence_check(default_config(4), [((-0.5,), (0.5,)), ((2.0,), (3.0,))], (4, 8, 16, 32, 64))
        self.assertTrue(report.passed(0.05))
        self.assertEqual(report.contains_origin, (True, False))
        self.assertAlmostEqual(report.integrals[-1, 0].real, 1.0, delta=0.05)

    def test_compact_function_must_vanish(self):
        with self.assertRaises(ConfigurationError):
            CompactFunction(1, 0.5, np.linspace(-1, 1, 5), np.ones(5))

    def test_error_ladder_decreases(self):
        js = (4, 8, 16)
        errors = error_ladder(self.f, self.cfg, js)
        values = [errors[j] for j in js]
        self.assertTrue(is_nonincreasing(values), values)
        self.assertLess(fit_rate(js, values), 0)
        l2 = error_ladder(self.f, self.cfg, js, norm="l2")
        self.assertLess(l2[16], l2[4])

    def test_transform_of_simple_shapes(self):
        indicator = CompactFunction.sample(lambda x: np.ones(len(x)), 1.0, n=2001, extent=1.5)
        values = forward_transform(indicator, np.array([0.0, math.pi]))
        self.assertAlmostEqual(values[0].real, 2.0, delta=2e-3)
        self.assertAlmostEqual(abs(values[1]), 0.0, delta=2e-3)
        disc = CompactFunction.sample(lambda x: np.ones(len(x)), 1.0, dim=2, n=801, extent=1.2)
        self.assertAlmostEqual(forward_transform(disc, np.zeros(2))[0].real, math.pi, delta=1e-2)

    def test_fit_rate_of_power_law(self):
        self.assertAlmostEqual(fit_rate((1, 2, 4, 8), (1.0, 0.5, 0.25, 0.125)), -1.0, places=12)


class ConeExtrapolationTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.lo, cls.hi = math.radians(30), math.radians(150)
        cls.center = bisector_center(cls.lo, cls.hi, 1.0)
        cls.transform = staticmethod(c1_bump_transform(1.0, 2))
        cls.points = np.array([[0.0, 0.0], [0.3, -0.2], [-0.5, 0.4], [0.1, 0.6]])

    def extrapolate_on(self, window, j):
        cfg = DeltaSeqConfig.build(j, 1.0, make_mollifier(window, self.center, 1.0))
        return extrapolate(sample_spectrum(self.transform, window), cfg, self.points).values

    def cone(self, **rule):
        return SpectralWindow.truncated_cone(self.lo, self.hi, 3.0, **rule)

    def test_refining_the_cone_rule_changes_nothing(self):
        coarse = self.extrapolate_on(self.cone(), 2)
        fine = self.extrapolate_on(self.cone(panels=64, count=960), 2)
        self.assertLess(np.max(np.abs(fine - coarse)), 1e-6)

    def test_cone_matches_ball_window(self):
        ball = SpectralWindow.ball(self.center, 1.0)
        for j in (1, 2):
            np.testing.assert_allclose(
                self.extrapolate_on(self.cone(), j), self.extrapolate_on(ball, j),
                rtol=0, atol=2e-6, err_msg=f"j={j}",
            )

    def test_cone_matches_convolution(self):
        f = CompactFunction.sample(c1_bump(1.0), 1.0, dim=2, n=81)
        at = [(40, 40), (52, 32), (20, 61)]
        points = np.array([[f.axis[i], f.axis[k]] for i, k in at])
        samples = sample_spectrum(self.transform, self.cone())
        cfg = DeltaSeqConfig.build(1, 1.0, make_mollifier(samples.window, self.center, 1.0))
        fields = convolution_ladder(f, cfg, (1, 2))
        for j in (1, 2):
            spectral = extrapolate(samples, cfg.with_j(j), points).values
            spatial = np.array([fields[j][i, k] for i, k in at])
            np.testing.assert_allclose(spectral, spatial, rtol=0, atol=1e-4, err_msg=f"j={j}")
