import logging
import os
from typing import Any

import numpy as np
from numpy.typing import NDArray
from rich.console import Console

# Common type aliases for clarity
type Matrix = NDArray[np.complex128]  # a dense complex operator on a 2^N chain space
type RealVector = NDArray[np.float64]
type Report = dict[str, Any]  # a JSON-ready report dictionary

# Disable Rich formatting in test environments (pytest or NO_COLOR set)
# This prevents ANSI escape codes and line wrapping in test output for more reliable test parsing.
_is_test_env = "PYTEST_VERSION" in os.environ

# Replaced by the Spinbath session constructor, which knows whether to log on stderr.
console = Console(
    force_terminal=False if _is_test_env else None,
    width=999999 if _is_test_env else None,  # Disable line wrapping in tests
)

# Global variable for log filter level (can be changed via --debug flag)
log_filter_level = logging.INFO

# Omit wall_time_s from reports so repeated runs are byte-identical
omit_timing = False

__all__ = ["console", "log_filter_level", "omit_timing", "Matrix", "RealVector", "Report"]
