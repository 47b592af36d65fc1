import pytest

from driftscan.detectors import default_tables


@pytest.fixture(scope="session")
def tables():
    """Process-wide calibration tables shared by every test."""
    return default_tables()
