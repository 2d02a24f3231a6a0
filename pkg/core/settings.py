"""
Django settings for core project.

The project is a thin shell around the ``satoseries`` library: it hosts the
``satoCertify`` management commands and the optional certification audit
trail.  Every tunable is read from the environment (``.env`` included).
"""

import os
from pathlib import Path
from django.core.management.utils import get_random_secret_key
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Ensure environment variables from .env override previously-set values.
load_dotenv(BASE_DIR / ".env", override=True)


SECRET_KEY = os.getenv("SECRET_KEY", get_random_secret_key())

DEBUG = os.getenv("DEBUG", "True").lower() in ("1", "true", "yes")

ALLOWED_HOSTS = os.getenv("ALLOWED_HOSTS", "localhost,127.0.0.1").split(",")


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'satoCertify',
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

ROOT_URLCONF = 'core.urls'

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

WSGI_APPLICATION = 'core.wsgi.application'


# Database

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    },
}


AUTH_PASSWORD_VALIDATORS = [
    {
        'NAME': 'django.contrib.auth.password_validation.UserAttributeSimilarityValidator',
    },
    {
        'NAME': 'django.contrib.auth.password_validation.MinimumLengthValidator',
    },
]


LANGUAGE_CODE = 'en-us'

TIME_ZONE = os.getenv("TIME_ZONE", "UTC")

USE_I18N = True

USE_TZ = True


STATIC_URL = 'static/'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ---------------------------------------------------------------------------
# Certification defaults (flags on the management commands override these)
# ---------------------------------------------------------------------------
SATO_DEFAULT_DIGITS = int(os.getenv("SATO_DEFAULT_DIGITS", "50"))
SATO_DEFAULT_ORDER = int(os.getenv("SATO_DEFAULT_ORDER", "100"))
SATO_GUARD_DIGITS = int(os.getenv("SATO_GUARD_DIGITS", "20"))
SATO_RECHECK_DELTA = int(os.getenv("SATO_RECHECK_DELTA", "16"))
SATO_REPORT_DIR = Path(os.getenv("SATO_REPORT_DIR", str(BASE_DIR / "archive" / "reports")))
SATO_LOG_DIR = os.getenv("SATO_LOG_DIR") or None
SATO_CATALOG_DIR = Path(os.getenv("SATO_CATALOG_DIR", str(BASE_DIR / "satoseries" / "catalog")))
SATO_JOBS = int(os.getenv("SATO_JOBS", "1"))
