from django.db import migrations, models
import django.db.models.deletion
import django.utils.timezone


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='RunManifest',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('synth', 'Synthesise scene'), ('ingest', 'Ingest walk test'), ('crossval', 'Cross-validate'), ('map', 'Build map'), ('render', 'Render image')], max_length=20)),
                ('config', models.JSONField(blank=True, default=dict)),
                ('input_digests', models.JSONField(blank=True, default=dict)),
                ('seed', models.DecimalField(decimal_places=0, default=0, max_digits=20)),
                ('tool_version', models.CharField(max_length=32)),
                ('output_paths', models.JSONField(blank=True, default=list)),
                ('created_at', models.DateTimeField(default=django.utils.timezone.now)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='MethodScore',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('position', models.PositiveIntegerField(default=0)),
                ('method', models.CharField(max_length=100)),
                ('status', models.CharField(choices=[('ok', 'Completed'), ('failed', 'Failed')], default='ok', max_length=20)),
                ('reason', models.TextField(blank=True)),
                ('folds', models.PositiveIntegerField(default=0)),
                ('rmse_mean', models.FloatField(blank=True, null=True)),
                ('rmse_std', models.FloatField(blank=True, null=True)),
                ('nmse_mean', models.FloatField(blank=True, null=True)),
                ('nmse_std', models.FloatField(blank=True, null=True)),
                ('mape_mean', models.FloatField(blank=True, null=True)),
                ('mape_std', models.FloatField(blank=True, null=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='scores', to='radiomap.runmanifest')),
            ],
            options={
                'ordering': ['run', 'position'],
            },
        ),
        migrations.AddIndex(
            model_name='runmanifest',
            index=models.Index(fields=['command', '-created_at'], name='radiomap_run_command_idx'),
        ),
        migrations.AddIndex(
            model_name='methodscore',
            index=models.Index(fields=['method', 'status'], name='radiomap_score_method_idx'),
        ),
    ]
