"""Shared fixtures for unit tests.

Note: Common fixtures like setup_test_environment and write_config
are defined in tests/conftest.py and shared across all tests.
"""
