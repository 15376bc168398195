import numpy as np
from django.test import SimpleTestCase, override_settings

from interpolation.interpolators import IdwParams, InterpolatorConfig, Method, TrainingSet
from radiomap.conf import get_setting
from radiomap.exceptions import FormatError, ShapeError, SizeError
from radiomap.geo_grid import (
    EARTH_RADIUS_M, GeoPoint, GridSpec, LocalPoint, Raster, Reducer, aggregate_xy, bin_indices, project,
)
from radiomap.pipeline import (
    UNKNOWN_CELL, QuarantinedRow, build_map, build_sinr_map, compare_maps, ingest_walktest,
    parse_walktest_row,
)
from radiomap.signal_metrics import rsrp_from_rssi
from scenes.synth_scene import SceneConfig, Transmitter, ground_truth_raster, sample_scene, walk_path_xy

ORIGIN = GeoPoint(55.944, -3.187)


def row(**changes):
    data = {
        'timestamp_s': '0', 'lat_deg': '55.9445', 'lon_deg': '-3.1865', 'rsrp_dbm': '-90',
        'rsrq_db': '-10', 'sinr_db': '', 'pci': '', 'n_prb': '20',
    }
    data.update(changes)
    return data


class IngestTests(SimpleTestCase):
    def test_valid_row(self):
        result = ingest_walktest([row()], ORIGIN)
        self.assertEqual(len(result.rssi), 1)
        self.assertAlmostEqual(result.rssi.values[0], -66.9897, delta=1e-4)
        expected = project(GeoPoint(55.9445, -3.1865), ORIGIN)
        self.assertAlmostEqual(result.rssi.points[0, 0], expected.x, places=9)
        self.assertAlmostEqual(result.rssi.points[0, 1], expected.y, places=9)
        self.assertEqual(result.rssi.cell_ids[0], UNKNOWN_CELL)
        self.assertEqual(len(result.sinr), 0)

    def test_rsrp_out_of_range_is_quarantined(self):
        result = ingest_walktest([row(), row(rsrp_dbm='-200')], ORIGIN)
        self.assertEqual(len(result.rssi), 1)
        self.assertEqual(len(result.quarantine), 1)
        self.assertEqual(result.quarantine[0].line, 3)
        self.assertIn("rsrp range", result.quarantine[0].reasons)

    def test_every_row_is_sample_or_quarantined(self):
        rows = [row(), row(n_prb='0'), row(lat_deg='91'), row(sinr_db='12.5', pci='7')]
        result = ingest_walktest(rows, ORIGIN)
        self.assertEqual(len(result.rssi) + len(result.quarantine), len(rows))
        self.assertEqual(result.n_rows, 4)

    def test_sinr_only_from_rows_that_carry_it(self):
        result = ingest_walktest([row(), row(sinr_db='12.5', pci='7')], ORIGIN)
        self.assertEqual(len(result.sinr), 1)
        self.assertEqual(result.sinr.values[0], 12.5)
        self.assertEqual(result.sinr.cell_ids[0], 7)

    def test_missing_prb_uses_default(self):
        result = ingest_walktest([row(n_prb='')], ORIGIN)
        self.assertEqual(get_setting('DEFAULT_N_PRB'), 20)
        self.assertAlmostEqual(result.rssi.values[0], -66.9897, delta=1e-4)

    def test_empty_input(self):
        result = ingest_walktest([], ORIGIN)
        self.assertEqual((len(result.rssi), len(result.sinr), len(result.quarantine)), (0, 0, 0))

    def test_unparseable_cell_is_a_format_error(self):
        with self.assertRaises(FormatError) as ctx:
            ingest_walktest([(5, row(rsrq_db='n/a'))], ORIGIN)
        self.assertEqual(ctx.exception.line, 5)

    def test_far_position_is_quarantined(self):
        parsed = parse_walktest_row(2, row(lat_deg='57.5'), ORIGIN)
        self.assertIsInstance(parsed, QuarantinedRow)
        self.assertTrue(parsed.reasons[0].startswith("position"))

    def test_empty_required_cell_is_quarantined(self):
        result = ingest_walktest([row(), row(rsrp_dbm=''), row()], ORIGIN)
        self.assertEqual(len(result.rssi), 2)
        self.assertEqual(len(result.quarantine), 1)
        self.assertEqual(result.quarantine[0].line, 3)
        self.assertEqual(result.quarantine[0].reasons, ("rsrp_dbm missing",))

    def test_every_empty_required_cell_is_named(self):
        parsed = parse_walktest_row(2, row(timestamp_s='', rsrq_db=''), ORIGIN)
        self.assertEqual(parsed.reasons, ("timestamp_s missing", "rsrq_db missing"))

    def test_row_and_report_violations_are_reported_together(self):
        parsed = parse_walktest_row(2, row(lat_deg='91', rsrp_dbm='-200'), ORIGIN)
        self.assertEqual(parsed.reasons, ("lat_deg range", "rsrp range"))
        parsed = parse_walktest_row(2, row(rsrq_db='30', n_prb='0', pci='2000'), ORIGIN)
        self.assertEqual(parsed.reasons, ("rsrq range", "n_prb ≥ 1", "pci range"))

    def test_position_and_report_violations_are_reported_together(self):
        parsed = parse_walktest_row(2, row(lat_deg='57.5', rsrp_dbm='-20'), ORIGIN)
        self.assertEqual(parsed.reasons[0], "rsrp range")
        self.assertTrue(parsed.reasons[1].startswith("position"))


class BuildMapTests(SimpleTestCase):
    def test_one_sample_gives_finite_raster(self):
        grid = GridSpec(LocalPoint(0, 0), bin_size=5, n_cols=4, n_rows=3)
        raster = build_map(TrainingSet([[3.0, 4.0]], [-70.0]), grid)
        self.assertTrue(np.all(np.isfinite(raster.values)))
        np.testing.assert_allclose(raster.values, -70.0, atol=1e-9)

    def test_tracks_ground_truth_near_the_walk(self):
        extent = GridSpec(LocalPoint(0, 0), bin_size=2, n_cols=30, n_rows=30)
        scene = SceneConfig(extent=extent, transmitters=(Transmitter(LocalPoint(-20, -20)),))
        path = walk_path_xy(extent, 5.0, seed=3)
        samples = sample_scene(scene, path)
        truth = ground_truth_raster(scene)

        raster = build_map(samples, extent)
        centers = extent.bin_centers()
        nearest = np.min(np.hypot(centers[:, None, 0] - path[None, :, 0],
                                  centers[:, None, 1] - path[None, :, 1]), axis=1)
        near = (nearest <= 10.0).reshape(extent.shape)
        err = raster.values[near] - truth.values[near]
        self.assertLess(float(np.sqrt(np.mean(err ** 2))), 3.0)

    def test_deterministic(self):
        grid = GridSpec(LocalPoint(0, 0), bin_size=1, n_cols=8, n_rows=8)
        rng = np.random.default_rng(4)
        xs, ys = np.meshgrid(np.arange(1.0, 8.0, 2.0), np.arange(1.0, 8.0, 2.0))
        points = np.column_stack([xs.ravel(), ys.ravel()]) + rng.uniform(-0.3, 0.3, (16, 2))
        samples = TrainingSet(points, rng.uniform(-90, -60, 16))
        a = build_map(samples, grid)
        b = build_map(samples, grid)
        np.testing.assert_array_equal(a.values, b.values)

    def test_pin_to_binned_mean(self):
        grid = GridSpec(LocalPoint(0, 0), bin_size=10, n_cols=3, n_rows=1)
        samples = TrainingSet([[2, 5], [4, 5], [25, 5]], [-60.0, -70.0, -80.0])
        cfg = InterpolatorConfig(Method.IDW, IdwParams())
        raster = build_map(samples, grid, cfg, pin_to_binned_mean=True)
        self.assertEqual(raster.value_at(0, 0), -65.0)
        self.assertEqual(raster.value_at(2, 0), -80.0)

    def test_pre_bin_interpolates_bin_means(self):
        grid = GridSpec(LocalPoint(0, 0), bin_size=10, n_cols=2, n_rows=1)
        samples = TrainingSet([[1, 1], [9, 9], [15, 5]], [-60.0, -70.0, -80.0])
        cfg = InterpolatorConfig(Method.IDW, IdwParams())
        raster = build_map(samples, grid, cfg, pre_bin=True)
        self.assertEqual(raster.value_at(0, 0), -65.0)
        self.assertEqual(raster.value_at(1, 0), -80.0)

    def test_pre_bin_outside_grid(self):
        grid = GridSpec(LocalPoint(0, 0), bin_size=1, n_cols=2, n_rows=2)
        with self.assertRaises(SizeError):
            build_map(TrainingSet([[50, 50]], [-60.0]), grid, pre_bin=True)

    def test_empty_samples(self):
        with self.assertRaises(SizeError):
            build_map(TrainingSet(np.empty((0, 2)), []), GridSpec())


class BuildSinrMapTests(SimpleTestCase):
    def setUp(self):
        self.grid = GridSpec(LocalPoint(0, 0), bin_size=2, n_cols=20, n_rows=20)
        xs, ys = np.meshgrid(np.arange(1.0, 40.0, 4.0), np.arange(1.0, 40.0, 4.0))
        self.points = np.column_stack([xs.ravel(), ys.ravel()])

    def test_constant_samples(self):
        raster = build_sinr_map(TrainingSet(self.points, np.full(len(self.points), 7.0)), self.grid)
        np.testing.assert_allclose(raster.values, 7.0, atol=1e-6)

    def test_overshoot_stays_within_margin(self):
        values = 5.0 * np.tanh((self.points[:, 0] - 20.0) / 4.0) * np.cos(self.points[:, 1] / 8.0)
        raster = build_sinr_map(TrainingSet(self.points, values), self.grid)
        margin = 3 * get_setting('OVERSHOOT_MARGIN_DB')
        self.assertGreaterEqual(float(raster.values.min()), -5.0 - margin)
        self.assertLessEqual(float(raster.values.max()), 5.0 + margin)

    def test_empty_sinr_set(self):
        with self.assertRaises(SizeError):
            build_sinr_map(TrainingSet(np.empty((0, 2)), []), self.grid)

    @override_settings(REMKIT_SETTINGS={'OVERSHOOT_MARGIN_DB': 0.5})
    def test_clipped_to_observed_range_plus_margin(self):
        values = 5.0 * np.tanh((self.points[:, 0] - 20.0) / 4.0) * np.cos(self.points[:, 1] / 8.0)
        raster = build_sinr_map(TrainingSet(self.points, values), self.grid)
        self.assertTrue(raster.populated.all())
        self.assertGreaterEqual(float(raster.values.min()), values.min() - 0.5)
        self.assertLessEqual(float(raster.values.max()), values.max() + 0.5)

    @override_settings(REMKIT_SETTINGS={'OVERSHOOT_MARGIN_DB': 0.0})
    def test_zero_margin_keeps_sample_range(self):
        values = np.where(self.points[:, 0] < 20.0, -3.0, 9.0)
        raster = build_sinr_map(TrainingSet(self.points, values), self.grid)
        unclipped = build_map(TrainingSet(self.points, values), self.grid)
        np.testing.assert_array_equal(raster.values, np.clip(unclipped.values, -3.0, 9.0))


class CompareMapsTests(SimpleTestCase):
    def setUp(self):
        self.grid = GridSpec(n_cols=3, n_rows=2)
        self.a = Raster.from_values(self.grid, [[-60, -65, -70], [-75, -80, np.nan]])

    def test_identical(self):
        diff, stats = compare_maps(self.a, self.a)
        self.assertEqual((stats.rmse, stats.bias), (0.0, 0.0))
        self.assertAlmostEqual(stats.overlap_fraction, 5 / 6)
        self.assertEqual(diff.counts.sum(), 5)

    def test_constant_offset(self):
        b = Raster.from_values(self.grid, self.a.values + 3.0)
        _, stats = compare_maps(self.a, b)
        self.assertAlmostEqual(stats.bias, -3.0, places=12)
        self.assertAlmostEqual(stats.rmse, 3.0, places=12)

    def test_disjoint(self):
        a = Raster.from_values(self.grid, [[-60, np.nan, np.nan], [np.nan] * 3])
        b = Raster.from_values(self.grid, [[np.nan, -60, np.nan], [np.nan] * 3])
        diff, stats = compare_maps(a, b)
        self.assertEqual(stats, stats.__class__(None, None, 0.0))
        self.assertFalse(diff.populated.any())

    def test_grid_mismatch(self):
        other = Raster.empty(GridSpec(n_cols=2, n_rows=3))
        with self.assertRaises(ShapeError):
            compare_maps(self.a, other)


class WalkInsideExtentTests(SimpleTestCase):
    def test_walk_samples_stay_in_extent(self):
        extent = GridSpec(LocalPoint(5, 5), bin_size=1, n_cols=40, n_rows=20)
        _, _, inside = bin_indices(extent, walk_path_xy(extent, 4.0, seed=1))
        self.assertTrue(inside.all())


def to_geo(xy, origin):
    """Inverse of the equirectangular projection about ``origin``."""
    scale = np.pi / 180.0 * EARTH_RADIUS_M
    lat = origin.lat + xy[:, 1] / scale
    lon = origin.lon + xy[:, 0] / (scale * np.cos(np.radians(origin.lat)))
    return lat, lon


class WalkTestToMapTests(SimpleTestCase):
    """A thousand-row walk test from CSV cells to a populated map."""

    def setUp(self):
        self.extent = GridSpec(LocalPoint(0, 0), bin_size=10, n_cols=16, n_rows=16)
        scene = SceneConfig(
            extent=self.extent,
            transmitters=(Transmitter(LocalPoint(-80, 80)), Transmitter(LocalPoint(260, 120), tx_power=18)),
        )
        xy = walk_path_xy(self.extent, 5.0, seed=9)
        self.assertGreaterEqual(len(xy), 1000)
        xy = xy[:1000]
        rssi = sample_scene(scene, xy).values
        rsrp = np.array([rsrp_from_rssi(value, -10.0, 20) for value in rssi])
        lat, lon = to_geo(xy, ORIGIN)
        self.rows = []
        for i in range(1000):
            cells = row(timestamp_s=str(i), lat_deg=f"{lat[i]:.9f}", lon_deg=f"{lon[i]:.9f}",
                        rsrp_dbm=f"{rsrp[i]:.6f}")
            if i % 20 == 0:
                cells['rsrp_dbm'] = '-200'
            self.rows.append(cells)

    def test_every_row_is_accounted_for(self):
        result = ingest_walktest(self.rows, ORIGIN)
        self.assertEqual(len(result.quarantine), 50)
        self.assertEqual(len(result.rssi), 950)
        self.assertEqual(len(result.rssi) + len(result.quarantine), 1000)
        self.assertEqual(result.n_rows, 1000)

    def test_map_agrees_with_binned_means(self):
        samples = ingest_walktest(self.rows, ORIGIN).rssi
        raster = build_map(samples, self.extent)
        self.assertTrue(raster.populated.all())
        binned = aggregate_xy(samples.points, samples.values, self.extent, Reducer.MEAN).raster
        sampled = binned.populated
        self.assertGreater(int(sampled.sum()), 200)
        err = np.abs(raster.values[sampled] - binned.values[sampled])
        self.assertLess(float(err.max()), 3.0)
