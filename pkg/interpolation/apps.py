from django.apps import AppConfig


class InterpolationConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'interpolation'
    verbose_name = 'Spatial interpolation'
