from typing import Any

from spinbath.exception import ConfigError

# Utility functions for safely reading config values, throwing user friendly errors to be caught
# upstream at the proper level.  i.e. for the common case we guarantee we don't return None.


def get_safe[T](d: dict[str, T], key: Any, where: str = "config") -> T:
    """Get a value from the given dictionary key, raising an error if missing."""
    value: T | None = d.get(key)
    if value is None:
        raise ConfigError(f"{where.capitalize()} is missing '{key}' field")
    return value


def reject_unknown_keys(d: dict[str, Any], allowed: set[str] | dict[str, Any], where: str) -> None:
    """Raise if d carries keys outside the allowed set."""
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown key(s) in {where}: {', '.join(unknown)}")


def get_int(d: dict[str, Any], key: str, where: str = "config") -> int:
    value = get_safe(d, key, where)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"Expected an integer for '{key}' in {where}, got {value!r}")
    return value


def get_float(d: dict[str, Any], key: str, where: str = "config") -> float:
    value = get_safe(d, key, where)
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(f"Expected a number for '{key}' in {where}, got {value!r}")
    return float(value)


def get_list(d: dict[str, Any], key: str, where: str = "config") -> list[Any]:
    value = get_safe(d, key, where)
    if not isinstance(value, list):
        raise ConfigError(f"Expected a list for '{key}' in {where}, got {type(value).__name__}")
    return value
