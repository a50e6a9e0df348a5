"""
Shared pytest configuration: environment defaults for the resource guards
and markers for the slow suites (m = 3 injectivity, 12-slot matching sums).
"""

import os

import pytest
from hypothesis import settings

os.environ.setdefault("FANO_MCK_MAX_COEFFICIENTS", "100000000")
os.environ.setdefault("FANO_MCK_MAX_SECONDS", "600")
os.environ.setdefault("FANO_MCK_MAX_INJECTIVITY_M", "4")
os.environ.setdefault("FANO_MCK_PARALLEL", "false")
os.environ.pop("FANO_MCK_LOG_FILE", None)

settings.register_profile("fano", max_examples=200, deadline=None, derandomize=True)
settings.load_profile("fano")


def pytest_configure(config):
    """Configure pytest with custom markers and settings."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )


def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers based on test names."""
    for item in items:
        if "cli" in item.nodeid.lower() or "scenario" in item.nodeid.lower():
            item.add_marker(pytest.mark.integration)

        if any(keyword in item.nodeid.lower() for keyword in ["m3", "twelve_slots", "acceptance"]):
            item.add_marker(pytest.mark.slow)
