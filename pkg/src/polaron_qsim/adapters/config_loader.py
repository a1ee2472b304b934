"""Read run configs from JSON or TOML and merge CLI overrides."""
import logging
import tomllib
from pathlib import Path
from typing import Any, Dict, Optional

import orjson

from ..config import RunConfig
from ..errors import ConfigError

logger = logging.getLogger("polaron_qsim.adapters.config_loader")


def read_config_file(path: str | Path) -> Dict[str, Any]:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    raw = p.read_bytes()
    try:
        if p.suffix.lower() == ".toml":
            data = tomllib.loads(raw.decode("utf-8"))
        else:
            data = orjson.loads(raw)
    except (orjson.JSONDecodeError, tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {p}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{p} must hold a mapping at the top level")
    logger.debug("loaded config %s with sections %s", p, sorted(data))
    return data


def _merge(base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def load_run_config(path: Optional[str | Path] = None, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Defaults < file < overrides; pydantic validation errors propagate unchanged."""
    data: Dict[str, Any] = read_config_file(path) if path else {}
    if overrides:
        data = _merge(data, overrides)
    return RunConfig.model_validate(data)
