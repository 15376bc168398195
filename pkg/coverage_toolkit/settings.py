"""
Django settings for the coverage_toolkit project.

The project hosts the radio coverage map toolkit: the numerical code lives in the
``radiomap``, ``interpolation`` and ``scenes`` apps and is driven through
``manage.py`` commands (synth, ingest, crossval, map, render).

Every value below can be overridden from the environment (or a ``.env`` file)
through python-decouple.
"""

from pathlib import Path

from decouple import Csv, config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='django-insecure-coverage-toolkit-local-only')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='', cast=Csv())


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',

    # Local apps
    'radiomap',
    'interpolation',
    'scenes',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'coverage_toolkit.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]


# Database (run manifests and cross-validation scores)

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': config('REMKIT_DB_PATH', default=str(BASE_DIR / 'db.sqlite3')),
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


STATIC_URL = 'static/'
STATIC_ROOT = BASE_DIR / 'staticfiles'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging: library modules log through logging.getLogger(__name__)

REMKIT_LOG_LEVEL = config('REMKIT_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'radiomap': {'handlers': ['console'], 'level': REMKIT_LOG_LEVEL, 'propagate': False},
        'interpolation': {'handlers': ['console'], 'level': REMKIT_LOG_LEVEL, 'propagate': False},
        'scenes': {'handlers': ['console'], 'level': REMKIT_LOG_LEVEL, 'propagate': False},
    },
}


# Coverage toolkit settings

REMKIT_SETTINGS = {
    'DEFAULT_SEED': config('REMKIT_DEFAULT_SEED', default=0, cast=int),
    'DEFAULT_N_PRB': config('REMKIT_DEFAULT_N_PRB', default=20, cast=int),
    'DEFAULT_FOLDS': 5,
    'EXTRAPOLATION_DIAGONALS': 2.0,
    'SOLVE_BATCH_SIZE': config('REMKIT_SOLVE_BATCH_SIZE', default=1024, cast=int),
    'VARIOGRAM_MAX_POINTS': config('REMKIT_VARIOGRAM_MAX_POINTS', default=2000, cast=int),
    'NMSE_MODE': config('REMKIT_NMSE_MODE', default='variance'),
    'RECORD_RUNS': config('REMKIT_RECORD_RUNS', default=True, cast=bool),
    'NODATA_GRAY': 0,
    'PNG_COLORMAP': config('REMKIT_PNG_COLORMAP', default='viridis'),
    'OVERSHOOT_MARGIN_DB': 2.0,
}
