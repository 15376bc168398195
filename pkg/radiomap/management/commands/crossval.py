from pathlib import Path

from django.core.management.base import CommandError

from interpolation.evaluation import crossval, render_report
from interpolation.interpolators import Method, TransmitterSite, load_methods
from radiomap.conf import get_setting
from radiomap.exceptions import ConfigError
from radiomap.formats import atomic_write_text, read_samples
from radiomap.management.base import RUNTIME_ERROR, ToolkitCommand
from scenes.synth_scene import SceneConfig


class Command(ToolkitCommand):
    help = 'Benchmark interpolation methods with k-fold cross-validation'
    command_name = 'crossval'

    def add_command_arguments(self, parser):
        parser.add_argument('samples', help='Samples CSV (x_m,y_m,value,cell_id)')
        parser.add_argument('methods_config', help='JSON list of interpolator configs')
        parser.add_argument('out_path', help='Report CSV; a markdown table is written beside it')
        parser.add_argument('--k', type=int, default=None, help='Number of folds (default 5)')
        parser.add_argument('--scene', default=None,
                            help='Scene JSON whose transmitters feed MRI configs that list none')
        parser.add_argument('--nmse-mode', choices=['variance', 'energy'], default=None)

    def _with_transmitters(self, methods, scene_path):
        if not any(cfg.method is Method.MRI and not cfg.params.transmitters for cfg in methods):
            return methods
        if scene_path is None:
            raise ConfigError("MRI needs transmitter positions: list them in its params or pass --scene")
        scene = SceneConfig.from_dict(self.read_json(scene_path, 'scene'))
        sites = tuple(
            TransmitterSite(tx.position.x, tx.position.y, tx.cell_id) for tx in scene.transmitters
        )
        return [
            cfg.with_params(transmitters=sites)
            if cfg.method is Method.MRI and not cfg.params.transmitters else cfg
            for cfg in methods
        ]

    def run(self, **options):
        samples_path = self.require_file(options['samples'], 'samples')
        methods = load_methods(self.read_json(options['methods_config'], 'methods'))
        methods = self._with_transmitters(methods, options['scene'])
        k = options['k'] or get_setting('DEFAULT_FOLDS')
        if k < 2:
            raise ConfigError(f"--k must be >= 2, got {k}")
        seed = self.seed_from(options)
        data = read_samples(samples_path)

        report = crossval(methods, data, k=k, seed=seed, threads=options['threads'],
                          nmse_mode=options['nmse_mode'])

        out = Path(options['out_path'])
        outputs = [
            atomic_write_text(out, render_report(report, 'csv')),
            atomic_write_text(out.with_suffix('.md'), render_report(report, 'markdown')),
        ]
        config = {
            'methods': [cfg.to_dict() for cfg in methods],
            'k': k,
            'nmse_mode': options['nmse_mode'] or get_setting('NMSE_MODE'),
        }
        inputs = {'samples': samples_path, 'methods': options['methods_config']}
        if options['scene']:
            inputs['scene'] = options['scene']
        self.write_manifest(out.with_suffix('.manifest.json'), config, inputs, seed, outputs,
                            scores=report.scores)

        if options['verbosity'] > 0:
            self.stdout.write(render_report(report, 'markdown'))
        if report.all_failed:
            raise CommandError("every method failed; see the report for reasons", returncode=RUNTIME_ERROR)
