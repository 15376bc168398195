from django.contrib.auth.models import User
from django.test import TestCase
from django.urls import reverse

from interpolation.evaluation import MethodScore as Score
from radiomap.models import MethodScore, RunManifest

MANIFEST = {
    'command': 'crossval',
    'config': {'k': 5},
    'input_digests': {'samples': 'sha256:00'},
    'seed': 2 ** 63,
    'tool_version': '0.3.0',
    'output_paths': ['report.csv', 'report.md'],
}


class RunManifestTests(TestCase):
    def test_from_manifest(self):
        run = RunManifest.from_manifest(MANIFEST)
        run.save()
        run.refresh_from_db()
        self.assertEqual(run.command, 'crossval')
        self.assertEqual(run.config, {'k': 5})
        self.assertEqual(run.output_count, 2)
        self.assertTrue(str(run).startswith("crossval (seed"))

    def test_scores_keep_their_order(self):
        run = RunManifest.from_manifest(MANIFEST)
        run.save()
        scores = [
            Score('RBF', rmse_mean=7.25, rmse_std=0.14, nmse_mean=0.4, nmse_std=0.02,
                  mape_mean=8.0, mape_std=0.3, folds=5),
            Score('OK', status='failed', reason='kriging system is singular', folds=2),
        ]
        MethodScore.objects.bulk_create([MethodScore.from_score(run, i, s) for i, s in enumerate(scores)])
        rows = list(run.scores.all())
        self.assertEqual([r.method for r in rows], ['RBF', 'OK'])
        self.assertEqual(str(rows[0]), "RBF: RMSE 7.25 ± 0.14 dB")
        self.assertEqual(rows[1].status, 'failed')
        self.assertIsNone(rows[1].rmse_mean)
        self.assertEqual(str(rows[1]), "OK: failed")


class AdminTests(TestCase):
    def setUp(self):
        user = User.objects.create_superuser('admin', 'admin@example.com', 'pw')
        self.client.force_login(user)
        self.run = RunManifest.from_manifest(MANIFEST)
        self.run.save()
        MethodScore.objects.create(run=self.run, method='IDW', rmse_mean=8.21, rmse_std=0.2, folds=5)

    def test_run_changelist(self):
        response = self.client.get(reverse('admin:radiomap_runmanifest_changelist'))
        self.assertEqual(response.status_code, 200)
        self.assertContains(response, "Coverage Toolkit Admin")

    def test_run_detail_shows_scores(self):
        response = self.client.get(reverse('admin:radiomap_runmanifest_change', args=[self.run.id]))
        self.assertContains(response, "8.21 ± 0.20")

    def test_score_changelist_links_run(self):
        response = self.client.get(reverse('admin:radiomap_methodscore_changelist'))
        self.assertContains(response, f"Run {self.run.id}")
