import faulthandler
import logging
import sys
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np
import rich.console
import typer
from rich.logging import RichHandler
from rich.markup import escape

import spinbath
from spinbath import Report
from spinbath.config import RunConfig, load_run_config
from spinbath.exception import ConfigError, ContractViolation, UserHandledError
from spinbath.report import build_report, write_json


def setup_logging(console: rich.console.Console):
    """
    Configures basic logging.
    """
    from spinbath import _is_test_env  # Lazy import to avoid circular dependency

    handlers = (
        [RichHandler(console=console, rich_tracebacks=True, markup=True)]
        if not _is_test_env
        else []
    )
    logging.basicConfig(
        level=spinbath.log_filter_level,  # use the global log filter level
        format="%(message)s",
        datefmt="[%X]",
        handlers=handlers,
        force=True,
    )


def remap_expected_errors(exc: BaseException | None) -> BaseException | None:
    """Remap expected library/OS exceptions onto the spinbath error classes."""
    if exc is None:
        return None
    if isinstance(exc, np.linalg.LinAlgError):
        return ContractViolation(f"Linear algebra failed: {exc}")
    if isinstance(exc, OSError):
        return UserHandledError(f"OS error: {exc}")
    return exc


def app_version() -> str:
    try:
        return version("spinbath")
    except PackageNotFoundError:
        return "dev"


class Spinbath:
    """One CLI command invocation: console, logging, config loading, report output and exit codes."""

    def __init__(self, cmd: str = "unspecified", stderr_logging: bool = False):
        """
        Args:
            cmd (str): The command name, recorded in every report this session writes.
            stderr_logging (bool): Whether to send console output to stderr.
        """
        from spinbath import _is_test_env  # Lazy import to avoid circular dependency

        # It is important to disable fancy colors and line wrapping if running under test - because
        # those tests will be string parsing our output.
        console = rich.console.Console(
            force_terminal=False if _is_test_env else None,
            width=999999 if _is_test_env else None,  # Disable line wrapping in tests
            stderr=stderr_logging,
        )
        spinbath.console = console
        setup_logging(console)

        try:
            faulthandler.enable(sys.stderr)  # catch native stack traces if we crash
        except Exception:
            pass  # ignore failures - it isn't supported on all architectures or in pytest

        self.cmd = cmd
        self.run: RunConfig | None = None
        self._started = time.perf_counter()
        logging.debug(f"spinbath {app_version()} running '{cmd}'")

    @property
    def elapsed(self) -> float:
        return time.perf_counter() - self._started

    def load(self, path: Path | None, seed: int | None = None, tol: float | None = None) -> RunConfig:
        """Load and validate the run configuration, applying command-line overrides."""
        if path is None:
            raise ConfigError("A run configuration is required: pass --config PATH")
        self.run = load_run_config(path).with_overrides(seed, tol)
        logging.info(f"Model: {self.run.model.describe()}")
        return self.run

    def write_report(self, payload: Report, out: Path | None) -> Report:
        """Wrap the payload with command, digest and timing, writing it to out when given."""
        if self.run is None:
            raise RuntimeError("write_report called before a config was loaded")
        report = build_report(self.cmd, self.run.digest, payload, self.elapsed)
        if out is not None:
            write_json(out, report)
        return report

    # --- Lifecycle ---
    def __enter__(self) -> "Spinbath":
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        exc = remap_expected_errors(exc)

        # Don't touch typer.Exit - it's used for controlled exit codes
        if exc is None or isinstance(exc, typer.Exit | KeyboardInterrupt):
            return False

        if isinstance(exc, UserHandledError):
            exc.ask_user_handled()
            raise typer.Exit(code=exc.exit_code)
        if isinstance(exc, ContractViolation):
            spinbath.console.print(f"[red]Contract violation:[/red] {escape(str(exc))}")
            raise typer.Exit(code=exc.exit_code)

        # Show the full exception for developers
        spinbath.console.print_exception(show_locals=False)  # Locals are too verbose
        raise typer.Exit(code=3)
