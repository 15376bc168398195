"""Access to the toolkit settings with library-safe fallbacks."""
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

DEFAULTS = {
    'DEFAULT_SEED': 0,
    'DEFAULT_N_PRB': 20,
    'DEFAULT_FOLDS': 5,
    'EXTRAPOLATION_DIAGONALS': 2.0,
    'SOLVE_BATCH_SIZE': 1024,
    'VARIOGRAM_MAX_POINTS': 2000,
    'NMSE_MODE': 'variance',
    'RECORD_RUNS': True,
    'NODATA_GRAY': 0,
    'PNG_COLORMAP': 'viridis',
    'OVERSHOOT_MARGIN_DB': 2.0,
}


def get_setting(name):
    """Return ``REMKIT_SETTINGS[name]``, or the built-in default outside a Django project."""
    try:
        overrides = getattr(settings, 'REMKIT_SETTINGS', {})
    except ImproperlyConfigured:
        overrides = {}
    if name in overrides:
        return overrides[name]
    return DEFAULTS[name]
