from __future__ import annotations

import json
import tomllib
from pathlib import Path
from typing import Any, Dict, Mapping, Union

from pydantic import ValidationError as PydanticValidationError

from src.models.run_config import RunConfig


class ConfigManagerError(Exception):
    """Raised for config manager related errors."""


def load_raw(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a `.toml` or `.json` config file into a plain dict."""
    p = Path(path)
    if not p.exists():
        raise ConfigManagerError(f"config file not found: {p}")
    try:
        if p.suffix.lower() == ".toml":
            with p.open("rb") as fh:
                return tomllib.load(fh)
        data = json.loads(p.read_text(encoding="utf-8"))
    except Exception as exc:
        raise ConfigManagerError(f"error reading config file {p}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigManagerError(f"config file {p} must hold a table/object at top level")
    return data


def load(path: Union[str, Path]) -> RunConfig:
    """Load and validate a RunConfig from a TOML or JSON file."""
    return validate(load_raw(path))


def merge(file_data: Mapping[str, Any], overrides: Mapping[str, Any]) -> Dict[str, Any]:
    """Apply command-line overrides on top of file values.

    Nested tables (inversion, window, chain) are merged key by key. Overrides
    equal to None leave the file value in place.
    """
    merged: Dict[str, Any] = {k: (dict(v) if isinstance(v, Mapping) else v) for k, v in file_data.items()}
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, Mapping):
            nested = dict(merged.get(key) or {})
            nested.update({k: v for k, v in value.items() if v is not None})
            if nested:
                merged[key] = nested
        else:
            merged[key] = value
    return merged


def save(config: Union[RunConfig, Dict[str, Any]], path: Union[str, Path]) -> None:
    """Save a RunConfig (or raw dict) to a JSON file."""
    p = Path(path)
    if isinstance(config, RunConfig):
        payload = config.as_dict()
    else:
        payload = config
    try:
        p.write_text(json.dumps(payload, indent=2, ensure_ascii=False, sort_keys=True), encoding="utf-8")
    except Exception as exc:
        raise ConfigManagerError(f"error writing config file {p}: {exc}") from exc


def validate(data: Union[Dict[str, Any], RunConfig]) -> RunConfig:
    """Validate and return a RunConfig instance."""
    if isinstance(data, RunConfig):
        return data
    try:
        return RunConfig.model_validate(data)
    except PydanticValidationError as exc:
        raise ConfigManagerError(f"invalid configuration: {exc}") from exc
