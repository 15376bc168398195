"""
Shared behaviour of the toolkit's management commands.

Every command accepts ``--seed``, ``--threads`` and ``--quiet``, writes a JSON run
manifest beside its outputs, and maps toolkit errors onto exit codes:
2 for usage and configuration errors, 1 for runtime and data failures.
"""
import json
import logging
import os
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from django.db import DatabaseError

import coverage_toolkit
from radiomap.conf import get_setting
from radiomap.exceptions import ConfigError, ToolkitError
from radiomap.formats import file_digest, write_json
from radiomap.models import MethodScore, RunManifest

logger = logging.getLogger(__name__)

TOOLKIT_LOGGERS = ('radiomap', 'interpolation', 'scenes')
USAGE_ERROR = 2
RUNTIME_ERROR = 1


class ToolkitCommand(BaseCommand):
    """Base for synth, ingest, crossval, map and render."""

    command_name = None

    def add_arguments(self, parser):
        self.add_command_arguments(parser)
        parser.add_argument('--seed', type=int, default=None,
                            help='Random seed (unsigned 64-bit); defaults to the configured seed')
        parser.add_argument('--threads', type=int, default=1, help='Worker threads for fitting and evaluation')
        parser.add_argument('--quiet', action='store_true', help='Only log warnings and errors')

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        if options['seed'] is not None and not 0 <= options['seed'] < 2 ** 64:
            raise CommandError(f"--seed must be an unsigned 64-bit integer, got {options['seed']}",
                               returncode=USAGE_ERROR)
        if options['threads'] < 1:
            raise CommandError(f"--threads must be >= 1, got {options['threads']}", returncode=USAGE_ERROR)
        saved = self._quiet(options['quiet'])
        try:
            self.run(**options)
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=USAGE_ERROR) from exc
        except ToolkitError as exc:
            raise CommandError(str(exc), returncode=RUNTIME_ERROR) from exc
        finally:
            for name, level in saved.items():
                logging.getLogger(name).setLevel(level)

    def run(self, **options):
        raise NotImplementedError

    @staticmethod
    def _quiet(quiet):
        saved = {}
        if quiet:
            for name in TOOLKIT_LOGGERS:
                log = logging.getLogger(name)
                saved[name] = log.level
                log.setLevel(logging.WARNING)
        return saved

    # helpers

    @staticmethod
    def seed_from(options, fallback=None) -> int:
        if options['seed'] is not None:
            return options['seed']
        return fallback if fallback is not None else get_setting('DEFAULT_SEED')

    @staticmethod
    def require_file(path, what='input') -> Path:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"{what} file not found: {path}")
        return path

    def read_json(self, path, what='config'):
        path = self.require_file(path, what)
        try:
            return json.loads(path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc

    def write_manifest(self, path, config, inputs, seed, outputs, scores=()):
        """Write the run manifest and mirror it into the database when possible.

        Input digests are keyed by role and output paths are relative to the
        manifest, so reruns into another directory give an identical manifest.
        """
        path = Path(path)
        manifest = {
            'command': self.command_name,
            'config': config,
            'input_digests': {role: file_digest(p) for role, p in sorted(inputs.items())},
            'seed': seed,
            'tool_version': coverage_toolkit.__version__,
            'output_paths': sorted(os.path.relpath(p, path.parent) for p in outputs),
        }
        write_json(path, manifest)
        run = self.record_run(manifest, scores)
        return manifest, run

    def record_run(self, manifest, scores=()):
        if not get_setting('RECORD_RUNS'):
            return None
        try:
            run = RunManifest.from_manifest(manifest)
            run.save()
            MethodScore.objects.bulk_create(
                [MethodScore.from_score(run, i, score) for i, score in enumerate(scores)]
            )
        except DatabaseError as exc:
            logger.warning("Run not recorded in the database (%s); the JSON manifest stands", exc)
            return None
        return run
