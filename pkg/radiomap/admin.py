from django.contrib import admin
from django.db.models import Count
from django.urls import reverse
from django.utils.html import format_html

from .models import MethodScore, RunManifest


class MethodScoreInline(admin.TabularInline):
    model = MethodScore
    extra = 0
    readonly_fields = ['method', 'status', 'rmse_display', 'nmse_display', 'mape_display', 'folds', 'reason']
    fields = ['method', 'status', 'rmse_display', 'nmse_display', 'mape_display', 'folds', 'reason']

    def rmse_display(self, obj):
        return _mean_std(obj.rmse_mean, obj.rmse_std)
    rmse_display.short_description = 'RMSE (dB)'

    def nmse_display(self, obj):
        return _mean_std(obj.nmse_mean, obj.nmse_std)
    nmse_display.short_description = 'NMSE'

    def mape_display(self, obj):
        return _mean_std(obj.mape_mean, obj.mape_std)
    mape_display.short_description = 'MAPE (%)'


def _mean_std(mean, std):
    if mean is None:
        return "N/A"
    return f"{mean:.2f} ± {std:.2f}"


@admin.register(RunManifest)
class RunManifestAdmin(admin.ModelAdmin):
    list_display = ['id', 'command', 'seed', 'tool_version', 'output_count', 'score_count', 'created_at']
    list_filter = ['command', 'tool_version', 'created_at']
    search_fields = ['command', 'output_paths']
    readonly_fields = ['command', 'config', 'input_digests', 'seed', 'tool_version', 'output_paths', 'created_at']
    inlines = [MethodScoreInline]
    date_hierarchy = 'created_at'

    def output_count(self, obj):
        return obj.output_count
    output_count.short_description = 'Outputs'

    def score_count(self, obj):
        return obj.n_scores
    score_count.short_description = 'Methods scored'

    def get_queryset(self, request):
        return super().get_queryset(request).annotate(n_scores=Count('scores'))


@admin.register(MethodScore)
class MethodScoreAdmin(admin.ModelAdmin):
    list_display = ['id', 'method', 'status', 'rmse_display', 'run_link', 'folds']
    list_filter = ['method', 'status']
    search_fields = ['method', 'reason']
    readonly_fields = [f.name for f in MethodScore._meta.fields]

    def run_link(self, obj):
        url = reverse('admin:radiomap_runmanifest_change', args=[obj.run.id])
        return format_html('<a href="{}">Run {}</a>', url, obj.run.id)
    run_link.short_description = 'Run'

    def rmse_display(self, obj):
        return _mean_std(obj.rmse_mean, obj.rmse_std)
    rmse_display.short_description = 'RMSE (dB)'


admin.site.site_header = "Coverage Toolkit Admin"
admin.site.site_title = "Coverage Toolkit"
admin.site.index_title = "Recorded runs"
