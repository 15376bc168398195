import numpy as np
from django.test import SimpleTestCase

from interpolation.interpolators import InterpolatorConfig, Method, TransmitterSite, fit, predict
from radiomap.geo_grid import GridSpec, LocalPoint
from scenes.synth_scene import SceneConfig, Transmitter, sample_scene, walk_path_xy


def every_method():
    methods = [InterpolatorConfig(method, seed=3) for method in Method if method is not Method.MRI]
    sites = (TransmitterSite(-30.0, 40.0), TransmitterSite(140.0, 90.0))
    methods.append(InterpolatorConfig(Method.MRI, seed=3).with_params(transmitters=sites))
    return methods


class RepeatabilityTests(SimpleTestCase):
    """Fitting twice on the same input gives the same bits, for every method."""

    def setUp(self):
        extent = GridSpec(LocalPoint(0, 0), bin_size=2, n_cols=60, n_rows=60)
        scene = SceneConfig(
            extent=extent,
            transmitters=(Transmitter(LocalPoint(-30, 40)), Transmitter(LocalPoint(140, 90), tx_power=20)),
            shadow_sigma=4.0,
            shadow_correlation_length=20.0,
            seed=7,
        )
        self.train = sample_scene(scene, walk_path_xy(extent, 8.0, seed=7))
        self.queries = np.random.default_rng(8).uniform(0, 120, (60, 2))

    def test_six_methods_are_covered(self):
        self.assertEqual({cfg.method for cfg in every_method()}, set(Method))

    def test_repeated_fits_are_bit_identical(self):
        for cfg in every_method():
            with self.subTest(method=cfg.name):
                first = predict(fit(cfg, self.train), self.queries)
                second = predict(fit(cfg, self.train), self.queries)
                self.assertTrue(np.all(np.isfinite(first)))
                np.testing.assert_array_equal(first, second)
