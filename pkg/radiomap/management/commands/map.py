from pathlib import Path

from interpolation.interpolators import InterpolatorConfig
from radiomap.exceptions import ConfigError, ValidationError
from radiomap.formats import read_samples, write_raster
from radiomap.geo_grid import GeoPoint, GridSpec, grid_for_points
from radiomap.management.base import ToolkitCommand
from radiomap.pipeline import build_map, build_sinr_map

UNITS = {'rssi': 'dBm', 'sinr': 'dB'}


class Command(ToolkitCommand):
    help = 'Interpolate samples into a coverage map raster (default: RBF, epsilon 1, smoothing 0.1)'
    command_name = 'map'

    def add_command_arguments(self, parser):
        parser.add_argument('samples', help='Samples CSV (x_m,y_m,value,cell_id)')
        parser.add_argument('grid_config', help='Grid JSON: origin_x, origin_y, bin_size, n_cols, n_rows; '
                                                'or {"auto": true, "bin_size": .., "margin": ..}')
        parser.add_argument('out_path', help='Raster CSV path; the sidecar and manifest go beside it')
        parser.add_argument('--method-config', default=None, help='Interpolator config JSON')
        parser.add_argument('--metric', choices=sorted(UNITS), default='rssi')
        parser.add_argument('--pin-to-binned-mean', action='store_true',
                            help='Overwrite sampled bins with the mean of their samples')
        parser.add_argument('--pre-bin', action='store_true',
                            help='Interpolate from per-bin means instead of raw samples')
        parser.add_argument('--origin-lat', type=float, default=None)
        parser.add_argument('--origin-lon', type=float, default=None)

    def _grid(self, data, samples) -> GridSpec:
        if not isinstance(data, dict):
            raise ConfigError("grid config must be a JSON object")
        try:
            if data.get('auto'):
                return grid_for_points(samples.points, float(data.get('bin_size', 1.0)),
                                       float(data.get('margin', 0.0)))
            return GridSpec.from_dict(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"grid config: {exc}") from exc

    def run(self, **options):
        samples_path = self.require_file(options['samples'], 'samples')
        grid_data = self.read_json(options['grid_config'], 'grid')
        seed = self.seed_from(options)
        if options['method_config']:
            cfg = InterpolatorConfig.from_dict(self.read_json(options['method_config'], 'method'))
        else:
            cfg = InterpolatorConfig.default_rbf(seed=seed)
        origin = None
        if options['origin_lat'] is not None or options['origin_lon'] is not None:
            try:
                origin = GeoPoint(options['origin_lat'], options['origin_lon'])
            except (TypeError, ValidationError) as exc:
                raise ConfigError("--origin-lat and --origin-lon go together and must be valid") from exc

        samples = read_samples(samples_path)
        grid = self._grid(grid_data, samples)
        flow = build_sinr_map if options['metric'] == 'sinr' else build_map
        raster = flow(samples, grid, cfg, pin_to_binned_mean=options['pin_to_binned_mean'],
                      pre_bin=options['pre_bin'], threads=options['threads'])

        out = Path(options['out_path']).with_suffix('.csv')
        outputs = write_raster(out, raster, options['metric'], UNITS[options['metric']], origin)
        config = {
            'method': cfg.to_dict(),
            'grid': grid.to_dict(),
            'metric': options['metric'],
            'pin_to_binned_mean': options['pin_to_binned_mean'],
            'pre_bin': options['pre_bin'],
        }
        inputs = {'samples': samples_path, 'grid': options['grid_config']}
        if options['method_config']:
            inputs['method'] = options['method_config']
        self.write_manifest(out.with_suffix('.manifest.json'), config, inputs, seed, outputs)
        if options['verbosity'] > 0:
            self.stdout.write(f"Wrote {options['metric']} map {out} ({grid.n_cols}x{grid.n_rows} bins)")
