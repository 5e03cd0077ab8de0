"""
Django settings for controversy_project.

The project has no web surface; Django supplies settings, logging and the
manage.py subcommand runner for the controversy toolkit.
"""

from pathlib import Path
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals; nothing here is signed or served.
SECRET_KEY = os.getenv('SECRET_KEY', 'django-insecure-default-key-for-development')

DEBUG = False

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'controversy',
]

# Every artifact is a plain file; no database is used.
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# REST Framework settings (serializers and the JSON renderer only)
REST_FRAMEWORK = {
    'DEFAULT_RENDERER_CLASSES': [
        'rest_framework.renderers.JSONRenderer',
    ],
    'UNICODE_JSON': True,
    'STRICT_JSON': True,
}


# Controversy toolkit defaults. Each value can be overridden through a
# CONTROVERSY_<NAME> environment variable.
CONTROVERSY = {
    'MASK_TOKEN': os.getenv('CONTROVERSY_MASK_TOKEN', '[MASK]'),
    'MIN_LEN': int(os.getenv('CONTROVERSY_MIN_LEN', '10')),
    'MAX_LEN': int(os.getenv('CONTROVERSY_MAX_LEN', '70')),
    'MIN_MENTIONS': int(os.getenv('CONTROVERSY_MIN_MENTIONS', '0')),
    'RADIUS': float(os.getenv('CONTROVERSY_RADIUS', '0.3')),
    'FALLBACK_SCORE': float(os.getenv('CONTROVERSY_FALLBACK_SCORE', '0.5')),
    'ALPHA': float(os.getenv('CONTROVERSY_ALPHA', '1.0')),
    'SKIP_OOV': os.getenv('CONTROVERSY_SKIP_OOV', 'true').lower() in ('1', 'true', 'yes'),
    'K': int(os.getenv('CONTROVERSY_K', '10')),
    'MIN_DF': int(os.getenv('CONTROVERSY_MIN_DF', '5')),
    'POSITIVE_THRESHOLD': int(os.getenv('CONTROVERSY_POSITIVE_THRESHOLD', '6')),
    'SEED': int(os.getenv('CONTROVERSY_SEED', '0')),
}


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'controversy': {
            'handlers': ['console'],
            'level': os.getenv('CONTROVERSY_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
