from importlib import resources
from pathlib import Path
from typing import Any

import tomlkit
from tomlkit.exceptions import ParseError
from tomlkit.toml_file import TOMLFile

from spinbath.exception import ConfigError

__all__ = ["read_packaged_toml", "read_toml"]


def _plain(doc: tomlkit.TOMLDocument) -> dict[str, Any]:
    """Strip tomlkit's formatting wrappers so values compare and serialize like JSON values."""
    return doc.unwrap()


def read_packaged_toml(name: str) -> dict[str, Any]:
    """Load defaults/<name>.toml shipped inside the spinbath package."""
    text = resources.files("spinbath").joinpath(f"defaults/{name}.toml").read_text()
    return _plain(tomlkit.parse(text))


def read_toml(path: Path) -> dict[str, Any]:
    """Load a TOML file from disk, turning parse errors into config errors."""
    try:
        return _plain(TOMLFile(path).read())
    except ParseError as e:
        raise ConfigError(f"{path} is not valid TOML: {e}")
