"""
Django settings for the cmadelic project.

The project has no web surface: Django provides the settings layer, the app
registry, management commands and the test runner.
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used for signing, which nothing in this project does.
SECRET_KEY = os.environ.get('CM_ADELIC_SECRET_KEY', 'cmadelic-offline-key')

DEBUG = False

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    # Local apps
    'galois',
]

# Nothing is persisted; the test runner still expects a database alias.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': ':memory:',
    }
}

# Internationalization
LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Galois image settings (defaults live in galois/conf.py)
CM_ADELIC_CACHE_DIR = os.environ.get('CM_ADELIC_CACHE', str(BASE_DIR / 'data' / 'lmfdb'))
CM_ADELIC_NETWORK = os.environ.get('CM_ADELIC_NO_NETWORK', '') not in ('1', 'true', 'yes')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'galois': {
            'handlers': ['console'],
            'level': os.environ.get('CM_ADELIC_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        },
    },
}
