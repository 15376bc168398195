import json
from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase

from radiomap.exceptions import ConfigError, ValidationError
from radiomap.geo_grid import GeoPoint, GridSpec, LocalPoint
from scenes.synth_scene import (
    SceneConfig, Transmitter, ground_truth_raster, received_power, received_power_xy, sample_scene,
    shadowing_fields, sinr_raster, synth_walk_path, synthesize, walk_path_xy,
)

EXTENT = GridSpec(LocalPoint(0, 0), bin_size=10, n_cols=10, n_rows=10)


def scene(*transmitters, **kwargs):
    return SceneConfig(extent=kwargs.pop('extent', EXTENT), transmitters=tuple(transmitters), **kwargs)


class ReceivedPowerTests(SimpleTestCase):
    def test_one_metre(self):
        tx = Transmitter(LocalPoint(0, 0), tx_power=30, ref_loss=40, exponent=2)
        self.assertEqual(received_power(tx, LocalPoint(1, 0)), -10.0)

    def test_hundred_metres(self):
        tx = Transmitter(LocalPoint(0, 0), tx_power=30, ref_loss=40, exponent=2)
        self.assertAlmostEqual(received_power(tx, LocalPoint(0, 100)), -50.0, places=12)

    def test_distance_is_clamped(self):
        tx = Transmitter(LocalPoint(5, 5), tx_power=30, ref_loss=40, exponent=2)
        self.assertEqual(received_power(tx, LocalPoint(5.5, 5)), received_power(tx, LocalPoint(6, 5)))
        self.assertEqual(received_power(tx, LocalPoint(5, 5)), -10.0)

    def test_exponent_range(self):
        with self.assertRaises(ValidationError):
            Transmitter(LocalPoint(0, 0), exponent=1.0)
        with self.assertRaises(ValidationError):
            Transmitter(LocalPoint(0, 0), exponent=6.5)

    def test_sector_antenna(self):
        tx = Transmitter(LocalPoint(0, 0), tx_power=30, ref_loss=40, exponent=2, azimuth=90.0)
        powers = received_power_xy(tx, [[100, 0], [0, 100], [-100, 0]])
        self.assertAlmostEqual(powers[0], -50.0, places=9)
        self.assertAlmostEqual(powers[1], -50.0 - 12.0 * (90 / 65) ** 2, places=9)
        self.assertAlmostEqual(powers[2], -75.0, places=9)


class GroundTruthTests(SimpleTestCase):
    def test_single_transmitter_matches_formula(self):
        tx = Transmitter(LocalPoint(33, 47), tx_power=20)
        raster = ground_truth_raster(scene(tx))
        centers = EXTENT.bin_centers()
        np.testing.assert_array_equal(raster.values.ravel(), received_power_xy(tx, centers))

    def test_colocated_duplicates(self):
        tx = Transmitter(LocalPoint(33, 47))
        np.testing.assert_array_equal(ground_truth_raster(scene(tx, tx)).values,
                                      ground_truth_raster(scene(tx)).values)

    def test_brute_force_three_transmitters(self):
        txs = [
            Transmitter(LocalPoint(-20, 10), tx_power=30, ref_loss=40, exponent=3.0),
            Transmitter(LocalPoint(55, 45), tx_power=20, ref_loss=38, exponent=2.5),
            Transmitter(LocalPoint(120, 95), tx_power=33, ref_loss=42, exponent=3.5),
        ]
        raster = ground_truth_raster(scene(*txs))
        for row in range(EXTENT.n_rows):
            for col in range(EXTENT.n_cols):
                cx = EXTENT.origin.x + (col + 0.5) * EXTENT.bin_size
                cy = EXTENT.origin.y + (row + 0.5) * EXTENT.bin_size
                best = -np.inf
                for tx in txs:
                    d = np.hypot(np.array([cx - tx.position.x]), np.array([cy - tx.position.y]))
                    power = tx.tx_power - (tx.ref_loss + 10.0 * tx.exponent * np.log10(np.maximum(d, 1.0)))
                    best = max(best, float(power[0]))
                self.assertEqual(raster.values[row, col], best, (col, row))

    def test_other_grid(self):
        tx = Transmitter(LocalPoint(50, 50))
        grid = GridSpec(LocalPoint(20, 20), bin_size=5, n_cols=4, n_rows=3)
        raster = ground_truth_raster(scene(tx), grid)
        self.assertEqual(raster.grid, grid)
        np.testing.assert_array_equal(raster.values.ravel(), received_power_xy(tx, grid.bin_centers()))

    def test_tiers(self):
        macro = Transmitter(LocalPoint(0, 0), tx_power=40, tier='macro')
        small = Transmitter(LocalPoint(90, 90), tx_power=10, tier='small')
        only_small = ground_truth_raster(scene(macro, small), tiers=['small'])
        np.testing.assert_array_equal(only_small.values.ravel(), received_power_xy(small, EXTENT.bin_centers()))
        with self.assertRaises(ValidationError):
            ground_truth_raster(scene(macro, small), tiers=['femto'])

    def test_no_transmitters(self):
        with self.assertRaises(ValidationError):
            ground_truth_raster(scene())


class SinrTests(SimpleTestCase):
    def test_single_transmitter_is_snr(self):
        tx = Transmitter(LocalPoint(50, 50))
        sinr = sinr_raster(scene(tx), noise_dbm=-100.0)
        power = ground_truth_raster(scene(tx))
        np.testing.assert_allclose(sinr.values, power.values + 100.0, atol=1e-9)

    def test_equal_transmitters_far_from_noise(self):
        tx = Transmitter(LocalPoint(50, 50), tx_power=40)
        sinr = sinr_raster(scene(tx, tx), noise_dbm=-200.0)
        np.testing.assert_allclose(sinr.values, 0.0, atol=1e-6)


class ShadowingTests(SimpleTestCase):
    def test_independent_shadowing_statistics(self):
        extent = GridSpec(LocalPoint(0, 0), bin_size=1, n_cols=100, n_rows=100)
        tx = Transmitter(LocalPoint(50, 50))
        noisy = scene(tx, extent=extent, shadow_sigma=8.0, seed=21)
        points = extent.bin_centers()
        residual = sample_scene(noisy, points).values - received_power_xy(tx, points)
        self.assertEqual(len(residual), 10000)
        self.assertTrue(7.5 <= residual.std() <= 8.5, residual.std())

    def test_correlation_at_one_length(self):
        extent = GridSpec(LocalPoint(0, 0), bin_size=1, n_cols=300, n_rows=300)
        field = shadowing_fields(scene(Transmitter(LocalPoint(0, 0)), extent=extent, shadow_sigma=1.0,
                                       shadow_correlation_length=5.0, seed=4))[0]
        lag = 5
        along_x = np.corrcoef(field[:, :-lag].ravel(), field[:, lag:].ravel())[0, 1]
        along_y = np.corrcoef(field[:-lag, :].ravel(), field[lag:, :].ravel())[0, 1]
        rho = (along_x + along_y) / 2
        # exp(-1) for an exponential covariance
        self.assertTrue(0.25 <= rho <= 0.5, rho)
        self.assertTrue(0.7 <= field.std() <= 1.3, field.std())

    def test_fields_do_not_depend_on_enabled_tiers(self):
        a = Transmitter(LocalPoint(10, 10), tier='macro')
        b = Transmitter(LocalPoint(90, 90), tier='small')
        noisy = scene(a, b, shadow_sigma=6.0, seed=2)
        points = [[15.0, 15.0], [85.0, 85.0]]
        both = sample_scene(noisy, points)
        only_macro = sample_scene(noisy, points, tiers=['macro'])
        self.assertEqual(both.values[0], only_macro.values[0])

    def test_zero_sigma_is_deterministic_part(self):
        tx = Transmitter(LocalPoint(40, 60))
        points = [[1.0, 2.0], [55.5, 70.25]]
        samples = sample_scene(scene(tx, seed=99), points)
        np.testing.assert_array_equal(samples.values, received_power_xy(tx, points))

    def test_same_seed_same_samples(self):
        noisy = scene(Transmitter(LocalPoint(40, 60)), shadow_sigma=8.0, shadow_correlation_length=15.0, seed=5)
        points = walk_path_xy(EXTENT, 10.0, seed=5)
        np.testing.assert_array_equal(sample_scene(noisy, points).values, sample_scene(noisy, points).values)

    def test_out_of_extent_point(self):
        with self.assertRaises(ValidationError):
            sample_scene(scene(Transmitter(LocalPoint(0, 0))), [[50, 50], [150, 50]])


class WalkPathTests(SimpleTestCase):
    def test_point_count(self):
        extent = GridSpec(LocalPoint(0, 0), bin_size=1, n_cols=100, n_rows=100)
        self.assertTrue(90 <= len(synth_walk_path(extent, 10.0, seed=0)) <= 130)

    def test_spacing_beyond_diagonal(self):
        extent = GridSpec(LocalPoint(0, 0), bin_size=1, n_cols=10, n_rows=10)
        path = synth_walk_path(extent, 500.0, seed=1)
        self.assertGreaterEqual(len(path), 1)
        self.assertTrue(all(extent.contains(p) for p in path))

    def test_same_seed_same_path(self):
        np.testing.assert_array_equal(walk_path_xy(EXTENT, 5.0, seed=8), walk_path_xy(EXTENT, 5.0, seed=8))

    def test_bad_spacing(self):
        with self.assertRaises(ValidationError):
            walk_path_xy(EXTENT, 0.0)


class SceneConfigTests(SimpleTestCase):
    DOC = {
        'extent': {'origin_x': 0, 'origin_y': 0, 'bin_size': 5, 'n_cols': 20, 'n_rows': 10},
        'transmitters': [{'x': 10, 'y': 20}, {'x': 80, 'y': 40, 'azimuth': 270, 'tier': 'small', 'cell_id': 12}],
        'shadow_sigma': 8,
        'shadow_correlation_length': 25,
        'seed': 3,
        'origin_lat': 55.944,
        'origin_lon': -3.187,
    }

    def test_from_dict(self):
        config = SceneConfig.from_dict(self.DOC)
        self.assertEqual(config.extent.shape, (10, 20))
        self.assertEqual([tx.cell_id for tx in config.transmitters], [0, 12])
        self.assertEqual(config.tiers, ['default', 'small'])
        self.assertEqual(config.origin, GeoPoint(55.944, -3.187))
        self.assertEqual(SceneConfig.from_json(config.to_json()), config)

    def test_unknown_key(self):
        with self.assertRaises(ConfigError):
            SceneConfig.from_dict(dict(self.DOC, walls=[]))
        with self.assertRaises(ConfigError):
            SceneConfig.from_dict(dict(self.DOC, transmitters=[{'x': 1, 'y': 2, 'height': 30}]))

    def test_missing_position(self):
        with self.assertRaises(ConfigError):
            SceneConfig.from_dict(dict(self.DOC, transmitters=[{'x': 1}]))

    def test_malformed_json(self):
        with self.assertRaises(ConfigError) as ctx:
            SceneConfig.from_json(json.dumps(self.DOC)[:-5])
        self.assertIn("line 1", str(ctx.exception))

    def test_negative_sigma(self):
        with self.assertRaises(ValidationError):
            scene(Transmitter(LocalPoint(0, 0)), shadow_sigma=-1.0)


class SynthesizeTests(SimpleTestCase):
    def test_campaign(self):
        config = scene(Transmitter(LocalPoint(30, 30)), Transmitter(LocalPoint(80, 70)),
                       shadow_sigma=4.0, shadow_correlation_length=20.0, seed=6, walk_spacing=10.0)
        campaign = synthesize(config, with_sinr=True)
        self.assertEqual(campaign.ground_truth.grid, EXTENT)
        self.assertIsNotNone(campaign.sinr)
        self.assertGreater(len(campaign.samples), 50)
        self.assertEqual(set(campaign.samples.cell_ids.tolist()), {0, 1})
        again = synthesize(config, with_sinr=True)
        np.testing.assert_array_equal(campaign.samples.values, again.samples.values)
        np.testing.assert_array_equal(campaign.ground_truth.values, again.ground_truth.values)


def random_transmitters(rng, n):
    return [
        Transmitter(LocalPoint(*rng.uniform(-30, 130, 2)), tx_power=float(rng.uniform(10, 30)),
                    exponent=float(rng.uniform(2.0, 4.0)),
                    azimuth=float(rng.uniform(0, 360)) if rng.random() < 0.5 else None)
        for _ in range(n)
    ]


class GroundTruthPropertyTests(SimpleTestCase):
    def test_adding_a_transmitter_never_lowers_a_bin(self):
        for seed in range(6):
            rng = np.random.default_rng(seed)
            existing = random_transmitters(rng, 3)
            (extra,) = random_transmitters(rng, 1)
            for sigma in (0.0, 6.0):
                noise = dict(shadow_sigma=sigma, shadow_correlation_length=20.0, seed=seed)
                before = ground_truth_raster(scene(*existing, **noise)).values
                after = ground_truth_raster(scene(*existing, extra, **noise)).values
                self.assertTrue(np.all(after >= before), (seed, sigma))

    def test_raising_tx_power_shifts_its_own_bins(self):
        centers = EXTENT.bin_centers()
        for seed in range(6):
            rng = np.random.default_rng(100 + seed)
            txs = random_transmitters(rng, 3)
            delta = float(rng.uniform(0.5, 6.0))
            k = int(rng.integers(3))
            stack = np.array([received_power_xy(tx, centers) for tx in txs])
            owned = (np.argmax(stack, axis=0) == k).reshape(EXTENT.shape)
            raised = list(txs)
            raised[k] = replace(txs[k], tx_power=txs[k].tx_power + delta)
            before = ground_truth_raster(scene(*txs)).values
            after = ground_truth_raster(scene(*raised)).values
            np.testing.assert_allclose(after[owned], before[owned] + delta, atol=1e-9)
            self.assertTrue(np.all(after >= before))
            self.assertTrue(np.all(after <= before + delta + 1e-9))
