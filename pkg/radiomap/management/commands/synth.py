from dataclasses import replace
from pathlib import Path

from radiomap.formats import write_raster, write_samples
from radiomap.management.base import ToolkitCommand
from scenes.synth_scene import DEFAULT_NOISE_DBM, SceneConfig, synthesize


class Command(ToolkitCommand):
    help = 'Generate a synthetic ground-truth map and walk-test samples from a scene config'
    command_name = 'synth'

    def add_command_arguments(self, parser):
        parser.add_argument('scene_config', help='Scene JSON document')
        parser.add_argument('out_dir', help='Directory for the generated files')
        parser.add_argument('--with-sinr', action='store_true', help='Also write the ground-truth SINR raster')
        parser.add_argument('--tiers', default=None,
                            help='Comma-separated transmitter tiers to switch on (default: all)')
        parser.add_argument('--noise-dbm', type=float, default=DEFAULT_NOISE_DBM,
                            help='Noise floor for the SINR raster')

    def run(self, **options):
        scene = SceneConfig.from_dict(self.read_json(options['scene_config'], 'scene'))
        seed = self.seed_from(options, scene.seed)
        scene = replace(scene, seed=seed)
        tiers = None
        if options['tiers']:
            tiers = [t.strip() for t in options['tiers'].split(',') if t.strip()]

        campaign = synthesize(scene, tiers=tiers, with_sinr=options['with_sinr'], noise_dbm=options['noise_dbm'])

        out = Path(options['out_dir'])
        outputs = write_raster(out / 'ground_truth.csv', campaign.ground_truth, 'rssi', 'dBm', scene.origin)
        outputs.append(write_samples(out / 'samples.csv', campaign.samples))
        if campaign.sinr is not None:
            outputs += write_raster(out / 'sinr_ground_truth.csv', campaign.sinr, 'sinr', 'dB', scene.origin)

        config = {
            'scene': scene.to_dict(),
            'tiers': list(campaign.tiers) if campaign.tiers is not None else None,
            'with_sinr': options['with_sinr'],
            'noise_dbm': options['noise_dbm'],
        }
        self.write_manifest(out / 'manifest.json', config, {'scene': options['scene_config']}, seed, outputs)
        if options['verbosity'] > 0:
            self.stdout.write(
                f"Wrote ground truth ({scene.extent.n_cols}x{scene.extent.n_rows} bins) "
                f"and {len(campaign.samples)} samples to {out}"
            )
