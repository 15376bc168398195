from pathlib import Path

from radiomap.exceptions import ConfigError, FormatError, ValidationError
from radiomap.formats import read_walktest_rows, write_quarantine, write_samples
from radiomap.geo_grid import GeoPoint
from radiomap.management.base import ToolkitCommand
from radiomap.pipeline import ingest_walktest


class Command(ToolkitCommand):
    help = 'Convert a walk-test CSV into RSSI and SINR sample files plus a quarantine list'
    command_name = 'ingest'

    def add_command_arguments(self, parser):
        parser.add_argument('walktest_csv', help='Walk-test log (timestamp_s,lat_deg,lon_deg,...)')
        parser.add_argument('out_dir', help='Directory for the sample files')
        parser.add_argument('--origin-lat', type=float, required=True, help='Latitude of the local frame origin')
        parser.add_argument('--origin-lon', type=float, required=True, help='Longitude of the local frame origin')

    def run(self, **options):
        path = self.require_file(options['walktest_csv'], 'walk-test')
        try:
            origin = GeoPoint(options['origin_lat'], options['origin_lon'])
        except ValidationError as exc:
            raise ConfigError(f"origin: {exc}") from exc

        rows = read_walktest_rows(path)
        try:
            result = ingest_walktest(rows, origin)
        except FormatError as exc:
            if exc.path is None:
                raise FormatError(exc.message, line=exc.line, path=path) from exc
            raise

        out = Path(options['out_dir'])
        outputs = [
            write_samples(out / 'rssi_samples.csv', result.rssi),
            write_samples(out / 'sinr_samples.csv', result.sinr),
            write_quarantine(out / 'quarantine.csv', result.quarantine),
        ]
        config = {'origin_lat': origin.lat, 'origin_lon': origin.lon}
        seed = self.seed_from(options)
        self.write_manifest(out / 'manifest.json', config, {'walktest': path}, seed, outputs)

        self.stderr.write(
            f"{result.n_rows} rows: {len(result.rssi)} RSSI samples, {len(result.sinr)} SINR samples, "
            f"{len(result.quarantine)} quarantined"
        )
        for row in result.quarantine[:10]:
            self.stderr.write(f"  line {row.line}: {'; '.join(row.reasons)}")
        if len(result.quarantine) > 10:
            self.stderr.write(f"  ... see {out / 'quarantine.csv'}")
