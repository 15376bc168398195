from django.db import models
from django.utils import timezone


class RunManifest(models.Model):
    """
    One recorded run of a toolkit command.

    The JSON manifest written next to the outputs is the reproducible record;
    this row mirrors it for browsing in the admin.
    """
    COMMAND_CHOICES = [
        ('synth', 'Synthesise scene'),
        ('ingest', 'Ingest walk test'),
        ('crossval', 'Cross-validate'),
        ('map', 'Build map'),
        ('render', 'Render image'),
    ]

    command = models.CharField(max_length=20, choices=COMMAND_CHOICES)
    config = models.JSONField(default=dict, blank=True)
    input_digests = models.JSONField(default=dict, blank=True)
    seed = models.DecimalField(max_digits=20, decimal_places=0, default=0)
    tool_version = models.CharField(max_length=32)
    output_paths = models.JSONField(default=list, blank=True)
    created_at = models.DateTimeField(default=timezone.now)

    class Meta:
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['command', '-created_at'], name='radiomap_run_command_idx'),
        ]

    def __str__(self):
        return f"{self.command} (seed {self.seed}) at {self.created_at:%Y-%m-%d %H:%M}"

    @property
    def output_count(self):
        return len(self.output_paths or [])

    @classmethod
    def from_manifest(cls, manifest):
        """Unsaved row mirroring a manifest dict as written by the commands."""
        return cls(
            command=manifest['command'],
            config=manifest.get('config', {}),
            input_digests=manifest.get('input_digests', {}),
            seed=manifest.get('seed', 0),
            tool_version=manifest.get('tool_version', ''),
            output_paths=manifest.get('output_paths', []),
        )


class MethodScore(models.Model):
    """
    Cross-validation statistics of one method within a crossval run
    """
    STATUS_CHOICES = [
        ('ok', 'Completed'),
        ('failed', 'Failed'),
    ]

    run = models.ForeignKey(RunManifest, related_name='scores', on_delete=models.CASCADE)
    position = models.PositiveIntegerField(default=0)
    method = models.CharField(max_length=100)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='ok')
    reason = models.TextField(blank=True)
    folds = models.PositiveIntegerField(default=0)

    rmse_mean = models.FloatField(null=True, blank=True)
    rmse_std = models.FloatField(null=True, blank=True)
    nmse_mean = models.FloatField(null=True, blank=True)
    nmse_std = models.FloatField(null=True, blank=True)
    mape_mean = models.FloatField(null=True, blank=True)
    mape_std = models.FloatField(null=True, blank=True)

    class Meta:
        ordering = ['run', 'position']
        indexes = [
            models.Index(fields=['method', 'status'], name='radiomap_score_method_idx'),
        ]

    def __str__(self):
        if self.status != 'ok':
            return f"{self.method}: failed"
        return f"{self.method}: RMSE {self.rmse_mean:.2f} ± {self.rmse_std:.2f} dB"

    @classmethod
    def from_score(cls, run, position, score):
        return cls(
            run=run,
            position=position,
            method=score.method,
            status='ok' if not score.failed else 'failed',
            reason=score.reason,
            folds=score.folds,
            rmse_mean=score.rmse_mean,
            rmse_std=score.rmse_std,
            nmse_mean=score.nmse_mean,
            nmse_std=score.nmse_std,
            mape_mean=score.mape_mean,
            mape_std=score.mape_std,
        )
