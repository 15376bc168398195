from django.apps import AppConfig


class RadiomapConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'radiomap'
    verbose_name = 'Radio coverage maps'
