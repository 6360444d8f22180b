"""
Django settings for spanlab.

The project is driven from the command line (``manage.py build|verify|
certify|sweep``); the ORM only backs sweep bookkeeping and the django-q2
broker, so no web stack is configured.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: only used to sign django-q2 task packages.
SECRET_KEY = os.environ.get(
    "DJANGO_SECRET_KEY", "django-insecure-dev-only-change-in-production"
)

DEBUG = os.environ.get("DJANGO_DEBUG", "True").lower() == "true"

ALLOWED_HOSTS: list[str] = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    # Third-party apps
    "django_q",
    # Local apps
    "spanners",
    "experiments",
]


# Database
# https://docs.djangoproject.com/en/6.0/ref/settings/#databases

DATABASES = {
    "default": {
        "ENGINE": os.environ.get("DB_ENGINE", "django.db.backends.sqlite3"),
        "NAME": os.environ.get("DB_NAME", BASE_DIR / "db.sqlite3"),
        "USER": os.environ.get("DB_USER", ""),
        "PASSWORD": os.environ.get("DB_PASSWORD", ""),
        "HOST": os.environ.get("DB_HOST", ""),
        "PORT": os.environ.get("DB_PORT", ""),
    }
}


# Internationalization

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Default primary key field type

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Django-Q2 Configuration
# Using the ORM as broker so sweeps need nothing beyond the database.
Q_CLUSTER = {
    "name": "spanlab",
    "workers": int(os.environ.get("SPANLAB_JOBS", "2")),
    "recycle": 500,
    "timeout": 3600,  # one sweep cell (n=2048 build + certify) fits comfortably
    "retry": 3700,
    "queue_limit": 50,
    "bulk": 10,
    "orm": "default",
}


# Spanner / certifier tunables
SPANLAB = {
    "DEFAULT_SEED": int(os.environ.get("SPANLAB_SEED", "0")),
    "BUILD_GUARDRAIL_N": int(os.environ.get("SPANLAB_BUILD_GUARDRAIL_N", "4096")),
    "CERT_G": float(os.environ.get("SPANLAB_CERT_G", "33")),
    "CERT_S": float(os.environ.get("SPANLAB_CERT_S", "400")),
    "C_SEARCH_LOW": float(os.environ.get("SPANLAB_C_LOW", "1")),
    "C_SEARCH_HIGH": float(os.environ.get("SPANLAB_C_HIGH", str(2.0**40))),
    "C_SEARCH_DIGITS": int(os.environ.get("SPANLAB_C_DIGITS", "3")),
}
