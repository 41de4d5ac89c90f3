"""Shared fixtures for integration tests.

Note: Common fixtures like setup_test_environment are defined in tests/conftest.py
and shared across all tests.  The acceptance sweeps here cover the larger chains and
are deselected by default: run them with pytest -m "slow or integration".
"""

import pytest

from spinbath.sweep import MAX_WORKERS_ENV


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """Integration runs share CPUs with pytest-xdist, so keep each sweep on one thread."""
    monkeypatch.setenv(MAX_WORKERS_ENV, "1")
