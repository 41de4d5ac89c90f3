"""Tests for spinbath.exception module."""

import pytest

from spinbath.exception import (
    ConfigError,
    ContractViolation,
    DegenerateBasisError,
    NotDensityMatrixError,
    SiteError,
    SizeGuardError,
    SpinbathError,
    UserHandledError,
)


class TestUserHandledError:
    """Tests for UserHandledError exception."""

    def test_user_handled_error_creation(self):
        """Test that UserHandledError can be created with a message."""
        error = UserHandledError("Test error message")
        assert str(error) == "Test error message"

    def test_user_handled_error_is_value_error(self):
        """Bad input is both a spinbath error and a ValueError."""
        assert issubclass(UserHandledError, SpinbathError)
        assert issubclass(UserHandledError, ValueError)

    def test_user_handled_error_rich_method(self):
        """Test that __rich__ returns the string representation."""
        error = UserHandledError("Test error")
        assert error.__rich__() == "Test error"

    def test_ask_user_handled_returns_false(self, capsys):
        """Test that ask_user_handled prints the error and returns False."""
        error = ConfigError("At least one bath required")
        assert error.ask_user_handled() is False
        captured = capsys.readouterr()
        assert "At least one bath required" in captured.out

    def test_ask_user_handled_escapes_markup(self, capsys):
        """Square brackets in messages are printed literally."""
        error = ConfigError("Unknown key(s) in baths[0]: temp")
        error.ask_user_handled()
        assert "baths[0]" in capsys.readouterr().out


class TestExitCodes:
    """Each error family maps to one process exit code."""

    @pytest.mark.parametrize(
        "error",
        [ConfigError, SiteError, NotDensityMatrixError, SizeGuardError, DegenerateBasisError],
    )
    def test_user_errors_exit_one(self, error):
        assert issubclass(error, UserHandledError)
        assert error("x").exit_code == 1

    def test_contract_violation_exits_two(self):
        assert ContractViolation("x").exit_code == 2
        assert not issubclass(ContractViolation, UserHandledError)

    def test_other_errors_exit_three(self):
        assert SpinbathError("x").exit_code == 3
