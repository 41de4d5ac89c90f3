"""Shared fixtures for all tests (unit and integration)."""

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from spinbath import paths


@pytest.fixture
def setup_test_environment(tmp_path):
    """Setup a test environment with an isolated user config directory.

    Also saves and restores the global spinbath state variables
    (log_filter_level, omit_timing) to prevent test pollution.
    """
    import spinbath

    original_log_level = spinbath.log_filter_level
    original_omit_timing = spinbath.omit_timing

    config_dir = tmp_path / "config"
    config_dir.mkdir(parents=True, exist_ok=True)
    paths.set_test_directories(config_dir)

    yield {
        "config_dir": config_dir,
        "tmp_path": tmp_path,
    }

    # Clean up: reset to None after test
    paths.set_test_directories(None)

    spinbath.log_filter_level = original_log_level
    spinbath.omit_timing = original_omit_timing


@pytest.fixture
def rng() -> np.random.Generator:
    """A seeded generator so random-input tests are reproducible."""
    return np.random.default_rng(20240601)


@pytest.fixture
def write_config(setup_test_environment) -> Callable[..., Path]:
    """Write a run configuration JSON file and return its path.

    Keyword arguments override the top-level fields of a two-bath paper-default chain.
    """
    tmp_path: Path = setup_test_environment["tmp_path"]
    counter = iter(range(1_000_000))

    def _write(**overrides: Any) -> Path:
        n = overrides.get("n_sites", 2)
        doc: dict[str, Any] = {
            "schema_version": 1,
            "n_sites": n,
            "b_field": 1.0,
            "jx": 1.0,
            "jy": 1.0,
            "baths": [{"site": 1, "beta": 0.5}, {"site": n, "beta": 1.0}],
        }
        doc.update(overrides)
        path = tmp_path / f"run{next(counter)}.json"
        path.write_text(json.dumps(doc))
        return path

    return _write
