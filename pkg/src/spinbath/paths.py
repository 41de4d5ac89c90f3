import os
from pathlib import Path

from platformdirs import PlatformDirs

app_name = "spinbath"
dirs = PlatformDirs(app_name, appauthor=False)
config_dir = Path(dirs.user_config_dir)
preferences_name = "spinbath.toml"

# Can be overridden for testing
_override_config_dir: Path | None = None

__all__ = ["set_test_directories", "get_user_config_dir", "get_user_config_path"]


def set_test_directories(config_dir_override: Path | None = None) -> None:
    """Set override directories for testing. Used by test fixtures to isolate test data."""
    global _override_config_dir
    _override_config_dir = config_dir_override


def get_user_config_dir() -> Path:
    """The user config directory: test override, else SPINBATH_CONFIG_DIR, else the platform default."""
    if _override_config_dir is not None:
        return _override_config_dir
    if env_dir := os.getenv("SPINBATH_CONFIG_DIR"):
        return Path(env_dir)
    return config_dir


def get_user_config_path() -> Path:
    """Returns the path to the user preference file (spinbath.toml), which need not exist."""
    return get_user_config_dir() / preferences_name
