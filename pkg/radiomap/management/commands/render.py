from pathlib import Path

from radiomap.exceptions import ConfigError
from radiomap.formats import atomic_write_bytes, read_raster, sidecar_path
from radiomap.imaging import parse_scale, render
from radiomap.management.base import ToolkitCommand


class Command(ToolkitCommand):
    help = 'Render a raster as a north-up heatmap (.pgm grayscale or .png colour)'
    command_name = 'render'

    def add_command_arguments(self, parser):
        parser.add_argument('raster', help='Raster CSV with its JSON sidecar beside it')
        parser.add_argument('out_image', help='Output image; the suffix picks the format')
        parser.add_argument('--scale', default=None, help='MIN:MAX in raster units (default: raster range)')

    def run(self, **options):
        raster_path = self.require_file(options['raster'], 'raster')
        self.require_file(sidecar_path(raster_path), 'raster sidecar')
        scale = parse_scale(options['scale']) if options['scale'] else None
        out = Path(options['out_image'])
        fmt = out.suffix.lower().lstrip('.')
        if fmt not in ('pgm', 'png'):
            raise ConfigError(f"unsupported image format {out.suffix!r}; use .pgm or .png")

        raster, sidecar = read_raster(raster_path)
        image = atomic_write_bytes(out, render(raster, fmt, scale))
        config = {'scale': list(scale) if scale else None, 'format': fmt, 'metric': sidecar.get('metric')}
        inputs = {'raster': raster_path, 'sidecar': sidecar_path(raster_path)}
        self.write_manifest(out.with_suffix(f'.{fmt}.manifest.json'), config, inputs,
                            self.seed_from(options), [image])
        if options['verbosity'] > 0:
            self.stdout.write(f"Wrote {out} ({raster.grid.n_cols}x{raster.grid.n_rows} px)")
