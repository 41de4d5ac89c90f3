"""Run configuration files and the layered analysis options.

Analysis options are resolved from (lowest precedence first) the packaged defaults, the user's
spinbath.toml [analysis] table, the run config's "analysis" object and finally --seed/--tol.
"""

import copy
import dataclasses
import hashlib
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from spinbath.exception import ConfigError
from spinbath.model import BathSpec, ChainParams, LindbladModel
from spinbath.paths import get_user_config_path
from spinbath.safety import get_float, get_int, get_list, get_safe, reject_unknown_keys
from spinbath.toml import read_packaged_toml, read_toml

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TOP_LEVEL_KEYS = {"schema_version", "n_sites", "b_field", "jx", "jy", "baths", "analysis"}
BATH_KEYS = {"site", "beta"}
MAX_SEED = 2**64 - 1

__all__ = [
    "SCHEMA_VERSION",
    "RunConfig",
    "analysis_defaults",
    "merge_options",
    "parse_run_config",
    "load_run_config",
]


def _coerce(default: Any, value: Any, where: str) -> Any:
    """Check an overriding value against the type of the default it replaces."""
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
    elif isinstance(default, int):
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif isinstance(default, float):
        if isinstance(value, int | float) and not isinstance(value, bool):
            return float(value)
    elif isinstance(default, str):
        if isinstance(value, str):
            return value
    elif isinstance(default, list):
        if isinstance(value, list):
            return list(value)
    raise ConfigError(f"'{where}' expects a {type(default).__name__}, got {value!r}")


def merge_options(base: dict[str, Any], overlay: dict[str, Any], where: str = "analysis") -> dict[str, Any]:
    """Overlay options onto base; every key must already exist in base with a compatible type."""
    if not isinstance(overlay, dict):
        raise ConfigError(f"'{where}' must be a table/object, got {overlay!r}")
    reject_unknown_keys(overlay, base, where)
    merged = copy.deepcopy(base)
    for key, value in overlay.items():
        path = f"{where}.{key}"
        default = base[key]
        if isinstance(default, dict):
            merged[key] = merge_options(default, value, path)
        else:
            merged[key] = _coerce(default, value, path)
    return merged


def analysis_defaults() -> dict[str, Any]:
    """Packaged defaults with the user's preference file layered on top."""
    options = read_packaged_toml("spinbath")
    prefs_path = get_user_config_path()
    if prefs_path.exists():
        prefs = read_toml(prefs_path)
        reject_unknown_keys(prefs, {"analysis"}, str(prefs_path))
        options = merge_options(options, prefs.get("analysis", {}), "analysis")
        logger.debug(f"Applied user preferences from {prefs_path}")
    return options


def _parse_beta(value: Any, where: str) -> float:
    # JSON has no literal for infinity, so "inf" is accepted as a string too
    if isinstance(value, str) and value.strip().lower() in {"inf", "+inf", "infinity"}:
        return math.inf
    if isinstance(value, bool) or not isinstance(value, int | float):
        raise ConfigError(f"Expected a number for 'beta' in {where}, got {value!r}")
    return float(value)


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"Seed must be an integer in 0..2^64-1, got {seed!r}")
    return seed


def _check_tol(tol: float) -> float:
    if not (math.isfinite(tol) and tol > 0):
        raise ConfigError(f"Tolerance must be positive and finite, got {tol!r}")
    return tol


@dataclass(frozen=True)
class RunConfig:
    """A validated run configuration: the model plus fully resolved analysis options."""

    model: LindbladModel
    analysis: dict[str, Any]
    source: Path | None = None

    @property
    def seed(self) -> int:
        return self.analysis["seed"]

    @property
    def tol(self) -> float:
        return self.analysis["tol"]

    def section(self, name: str) -> dict[str, Any]:
        return get_safe(self.analysis, name, "analysis options")

    def with_overrides(self, seed: int | None = None, tol: float | None = None) -> "RunConfig":
        """Apply the command-line --seed/--tol, which win over every config layer."""
        analysis = copy.deepcopy(self.analysis)
        if seed is not None:
            analysis["seed"] = _check_seed(seed)
        if tol is not None:
            analysis["tol"] = _check_tol(float(tol))
        return dataclasses.replace(self, analysis=analysis)

    def two_bath_betas(self) -> tuple[float, float] | None:
        """(beta, beta') when the model has exactly one bath on site 1 and one on site N >= 2."""
        n = self.model.n_sites
        by_site = {b.site: b.beta for b in self.model.baths}
        if n < 2 or len(by_site) != 2 or set(by_site) != {1, n}:
            return None
        return by_site[1], by_site[n]

    def to_dict(self) -> dict[str, Any]:
        p = self.model.params
        return {
            "schema_version": SCHEMA_VERSION,
            "n_sites": p.n_sites,
            "b_field": p.b_field,
            "jx": p.jx,
            "jy": p.jy,
            "baths": [{"site": b.site, "beta": b.beta} for b in self.model.baths],
            "analysis": self.analysis,
        }

    @property
    def digest(self) -> str:
        """sha256 of the canonical JSON of the resolved configuration."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def parse_run_config(
    doc: dict[str, Any], defaults: dict[str, Any] | None = None, source: Path | None = None
) -> RunConfig:
    """Validate a run configuration document and build its model."""
    where = str(source) if source else "config"
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must contain an object at the top level")
    reject_unknown_keys(doc, TOP_LEVEL_KEYS, where)
    version = get_int(doc, "schema_version", where)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"Unsupported schema_version {version}, expected {SCHEMA_VERSION}")

    couplings = {k: get_float(doc, k, where) for k in ("b_field", "jx", "jy") if k in doc}
    params = ChainParams(get_int(doc, "n_sites", where), **couplings)

    raw_baths = get_list(doc, "baths", where) if "baths" in doc else []
    baths = []
    for i, entry in enumerate(raw_baths):
        bath_where = f"baths[{i}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{bath_where} must be an object with 'site' and 'beta'")
        reject_unknown_keys(entry, BATH_KEYS, bath_where)
        beta = _parse_beta(get_safe(entry, "beta", bath_where), bath_where)
        baths.append(BathSpec(get_int(entry, "site", bath_where), beta))
    model = LindbladModel(params, tuple(baths))

    base = defaults if defaults is not None else analysis_defaults()
    analysis = merge_options(base, doc.get("analysis", {}), "analysis")
    _check_seed(analysis["seed"])
    _check_tol(analysis["tol"])
    return RunConfig(model, analysis, source)


def _read_document(path: Path) -> dict[str, Any]:
    if not path.is_file():
        raise ConfigError(f"Config file {path} does not exist")
    if path.suffix.lower() == ".toml":
        return read_toml(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e


def load_run_config(path: Path) -> RunConfig:
    """Read a JSON (or .toml) run configuration from disk and validate it."""
    config = parse_run_config(_read_document(path), source=path)
    logger.debug(f"Loaded {path}: {config.model.describe()}")
    return config
