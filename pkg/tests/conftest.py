import os
import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "core.settings")

# Only initialize once
if not django.apps.apps.ready:
    django.setup()

import pytest

from satoseries.rsseries import load_catalog
from satoseries.specfun import PrecisionContext


@pytest.fixture
def ctx():
    return PrecisionContext(30)


@pytest.fixture
def ctx50():
    return PrecisionContext(50)


@pytest.fixture
def catalog():
    return load_catalog()


@pytest.fixture
def sato_dirs(settings, tmp_path):
    """Point reports and logs at a temporary directory."""
    settings.SATO_REPORT_DIR = tmp_path / "reports"
    settings.SATO_LOG_DIR = None
    return tmp_path
