import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from irrper.numeric import get_context  # noqa: E402


@pytest.fixture(scope="session")
def fp():
    return get_context("double")


@pytest.fixture(scope="session")
def mp():
    return get_context("extended")
