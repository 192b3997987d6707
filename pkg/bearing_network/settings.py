"""
Django settings for bearing_network project.

Generated by 'django-admin startproject' using Django 5.2.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""
import os
import sys
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# Quick-start development settings - unsuitable for production
# See https://docs.djangoproject.com/en/5.2/howto/deployment/checklist/

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    "DJANGO_SECRET_KEY",
    "django-insecure-bearing-network-local-development-key",
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get("DJANGO_DEBUG", "1") == "1"

ALLOWED_HOSTS = ["*"]

# TestClient(api) 는 urls.py 에 이미 올라간 api 를 다시 등록함
if sys.argv[1:2] == ["test"]:
    os.environ.setdefault("NINJA_SKIP_REGISTRY", "yes")


# Application definition

INSTALLED_APPS = [
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",
    "networks",
    "bearings",
    "rigidity",
    "localizability",
    "protocols",
    "sensitivity",
    "reports",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "bearing_network.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "bearing_network.wsgi.application"


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True


# Static files (CSS, JavaScript, Images)
# https://docs.djangoproject.com/en/5.2/howto/static-files/

STATIC_URL = "static/"

STATIC_ROOT = os.path.join(BASE_DIR, "staticfiles")

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# Logging

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{asctime} {levelname} {name} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        app: {
            "handlers": ["console"],
            "level": os.environ.get("BEARING_LOG_LEVEL", "INFO"),
            "propagate": False,
        }
        for app in (
            "networks",
            "bearings",
            "rigidity",
            "localizability",
            "protocols",
            "sensitivity",
            "reports",
        )
    },
}

# Bearing network numerics

# collocation tolerance is this scale times (1 + largest coordinate magnitude)
BEARING_POSITION_TOL_SCALE = 1e-12

# None selects order * 2**-52 * lambda_max of the matrix being ranked
BEARING_RANK_TOL = None

# None selects dn_f * 2**-52 * lambda_max(B_ff)
BEARING_LOC_TOL = None

BEARING_NEAR_SINGULAR_FACTOR = 1e3

# smallest singular value of the anchor rows of the null basis counted as nonzero
BEARING_ANCHOR_BLOCK_TOL = 1.4901161193847656e-08

BEARING_ILL_CONDITIONED = 1e12

BEARING_FLOW = {
    "STEP_SIZE": "auto",
    "MAX_STEPS": 100000,
    "CONVERGENCE_TOL": 1e-9,
    "RECORD_EVERY": 1,
}

BEARING_DEFAULT_SEED = 0
