from typing import Any


class SpinbathError(Exception):
    """Base class for every error raised by the spinbath library."""

    exit_code = 3

    def __rich__(self) -> Any:
        return self.__str__()  # At least this is something readable...


class UserHandledError(SpinbathError, ValueError):
    """Bad input the user can fix: a malformed config, an out of range site, a non-density matrix."""

    exit_code = 1

    def ask_user_handled(self) -> bool:
        """Print a friendly message about the error.
        Returns:
            True if the error was handled, False otherwise.
        """
        from rich.markup import escape

        from spinbath import console  # Lazy import to avoid circular dependency

        console.print(f"[red]Error:[/red] {escape(str(self))}")
        return False


class ContractViolation(SpinbathError):
    """A numerical contract failed (residual above tolerance, non-decreasing convergence, empty kernel)."""

    exit_code = 2


class ConfigError(UserHandledError):
    """The run configuration does not validate."""


class SiteError(UserHandledError):
    """A site index outside 1..N."""


class ShapeMismatchError(UserHandledError):
    """Two operators that must act on the same space do not."""


class NotHermitianError(UserHandledError):
    """A Hermitian input was expected."""


class NotPositiveError(UserHandledError):
    """A positive semidefinite input has a negative eigenvalue beyond tolerance."""


class NotDensityMatrixError(UserHandledError):
    """Input is not a density matrix (trace one, Hermitian, positive semidefinite)."""


class NotFaithfulError(UserHandledError):
    """A faithful (strictly positive) state was required."""


class SizeGuardError(UserHandledError):
    """The requested chain is too large for dense superoperator work."""


class UnsupportedModelError(UserHandledError):
    """The analysis is not defined for this model (e.g. unequal bath temperatures)."""


class DegenerateBasisError(UserHandledError):
    """A GNS basis was requested at a temperature where it degenerates (beta = +inf)."""


__all__ = [
    "SpinbathError",
    "UserHandledError",
    "ContractViolation",
    "ConfigError",
    "SiteError",
    "ShapeMismatchError",
    "NotHermitianError",
    "NotPositiveError",
    "NotDensityMatrixError",
    "NotFaithfulError",
    "SizeGuardError",
    "UnsupportedModelError",
    "DegenerateBasisError",
]
