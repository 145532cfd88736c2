"""
Runtime settings for cubicurve computations.

Settings are assembled from several sources. In increasing order of precedence, these are the built-in
defaults, a YAML configuration file, ``CUBICURVE_*`` environment variables, and explicit keyword overrides.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any

import yaml

logger = logging.getLogger("cubicurve")

ENV_PREFIX = "CUBICURVE_"
DEFAULT_CONFIGFILE = "~/.cubicurve.yaml"


@dataclass(frozen=True)
class Settings:
    """
    Numerical and runtime knobs shared by all modules.

    Parameters
    ----------
    threads: int
        Upper bound on worker threads used by rendering and root classification.
    trunc: int
        Default series truncation, in integral powers of ``xi``.
    escape_iterations: int
        Iteration budget for escape detection.
    a_min: float
        Smallest ``|a|`` at which kneading classification is considered reliable.
    fiber_radius: float
        Default ``|a|`` for fiber enumeration.
    seed: int
        Seed for randomized root finder starts.
    """

    threads: int = os.cpu_count() or 1
    trunc: int = 12
    escape_iterations: int = 500
    a_min: float = 8.0
    fiber_radius: float = 10.0
    seed: int = 0


def _coerce(name: str, raw: Any) -> Any:
    field_types = {f.name: f.type for f in fields(Settings)}
    if name not in field_types:
        raise ValueError(f"unknown setting {name!r} (hint: valid settings are {sorted(field_types)})")
    kind = {"int": int, "float": float}[str(field_types[name])]
    try:
        return kind(raw)
    except (TypeError, ValueError) as e:
        raise ValueError(f"invalid value {raw!r} for setting {name!r}") from e


def _read_configfile(path: str | os.PathLike[str]) -> dict[str, Any]:
    p = Path(path).expanduser()
    if not p.exists():
        return {}
    with open(p, encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"configuration file {str(p)!r} must contain a mapping")
    logger.debug(f"Read {len(data)} setting(s) from {str(p)!r}")
    return data


def load_settings(configfile: str | os.PathLike[str] | None = None, **overrides: Any) -> Settings:
    """
    Assemble settings from defaults, a YAML file, the environment, and keyword overrides.

    Parameters
    ----------
    configfile: str | os.PathLike[str] | None
        Path to a YAML configuration file. Falls back to ``$CUBICURVE_CONFIG``, then
        ``~/.cubicurve.yaml``. A missing file is not an error.
    **overrides: Any
        Explicit values, for example from command line flags. ``None`` values are ignored.

    Returns
    -------
    Settings
        The merged settings.

    Raises
    ------
    ValueError
        If a source names an unknown setting or carries a malformed value.
    """
    path = configfile or os.getenv(ENV_PREFIX + "CONFIG") or DEFAULT_CONFIGFILE
    merged: dict[str, Any] = {}
    for key, value in _read_configfile(path).items():
        merged[key] = _coerce(key, value)

    for f in fields(Settings):
        env_value = os.getenv(ENV_PREFIX + f.name.upper())
        if env_value is not None:
            merged[f.name] = _coerce(f.name, env_value)

    for key, value in overrides.items():
        if value is not None:
            merged[key] = _coerce(key, value)

    settings = replace(Settings(), **merged)
    if settings.threads < 1:
        raise ValueError(f"threads must be at least one, got {settings.threads}")
    return settings
