"""
Django settings for the approx_site project.

The project hosts the `approx` app: stable numerical differentiation,
spectral extrapolation with delta-type kernels, limited-angle tomography and
the Property-C witnesses, driven through management commands.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# No request handling happens in this project; the key only satisfies Django.
SECRET_KEY = os.environ.get("APPROX_SECRET_KEY", "approx-local-only")

DEBUG = os.environ.get("APPROX_DEBUG", "0") == "1"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'approx',
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get("APPROX_DB_PATH", BASE_DIR / 'db.sqlite3'),
    }
}


REST_FRAMEWORK = {
    "UNAUTHENTICATED_USER": None,
}


# Numerical defaults shared by the approx modules and commands.
APPROX = {
    "OUTPUT_DIR": Path(os.environ.get("APPROX_OUTPUT_DIR", BASE_DIR / "runs")),
    # composite Gauss-Legendre panels for spectral windows
    "WINDOW_PANELS": 64,
    "WINDOW_ORDER": 16,
    "ANGULAR_NODES": 48,
    # truncated cones: radial panels on [0, T] and angular nodes across the sector
    "CONE_PANELS": 32,
    "CONE_ANGULAR_NODES": 480,
    # spatial quadrature for the kernel spectrum (quadrature method)
    "SPATIAL_PANELS": 256,
    "SPATIAL_ORDER": 16,
    "TAIL_TOLERANCE": 1e-5,
    # f_j is refused when the spectral data error could be magnified beyond this
    "MAX_AMPLIFICATION": 1e8,
    "AMPLIFICATION_WARNING": 1e4,
    "QUADRATURE_TOLERANCE": 1e-6,
    "SVD_RCOND": 1e-12,
    "CHUNK_SIZE": 1 << 18,
    "WORKERS": int(os.environ.get("APPROX_WORKERS", "1")),
    "REGRESSION_TOLERANCE": 0.10,
}


LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "plain"},
    },
    "loggers": {
        "approx": {
            "handlers": ["console"],
            "level": os.environ.get("APPROX_LOG_LEVEL", "WARNING"),
            "propagate": False,
        },
    },
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
