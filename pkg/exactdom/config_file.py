"""Load run settings from an optional exactdom.yml in the working directory.

Sweep scripts can keep a shared configuration next to their outputs and
override single values on the command line.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from .logger import log

# Checked in order when no --config is given
_CONFIG_FILENAMES = [
    "exactdom.yml",
    "exactdom.yaml",
    ".exactdom.yml",
]

_INT_KEYS = ("n", "rings", "thetas", "boundary_samples", "seed", "samples")
_FLOAT_KEYS = ("alpha", "rmax", "quad_tol")
_STR_KEYS = ("operator", "target", "suite", "out", "case", "lambda4_tail", "preset")


@dataclass
class FileConfig:
    """Settings read from the YAML file; ``None`` means not set there."""

    operator: Optional[str] = None
    target: Optional[str] = None
    target_params: Dict[str, complex] = field(default_factory=dict)
    alpha: Optional[float] = None
    beta: Optional[complex] = None
    gamma: Optional[complex] = None
    n: Optional[int] = None
    rmax: Optional[float] = None
    rings: Optional[int] = None
    thetas: Optional[int] = None
    boundary_samples: Optional[int] = None
    quad_tol: Optional[float] = None
    seed: Optional[int] = None
    samples: Optional[int] = None
    suite: Optional[str] = None
    out: Optional[str] = None
    case: Optional[str] = None
    lambda4_tail: Optional[str] = None
    preset: Optional[str] = None
    source: Optional[str] = None

    @property
    def has_overrides(self) -> bool:
        return bool(self.target_params) or any(
            getattr(self, name) is not None
            for name in _INT_KEYS + _FLOAT_KEYS + _STR_KEYS + ("beta", "gamma")
        )


def load_file_config(path: Optional[str] = None, workdir: Optional[str] = None) -> FileConfig:
    """Read ``path``, or the first default file name found in ``workdir``.

    A missing explicit path is an error the caller reports; a missing default
    file just yields an empty FileConfig.
    """
    if path:
        if not os.path.isfile(path):
            raise FileNotFoundError(f"config file not found: {path}")
        return _parse_config_file(path)

    root = workdir or os.getcwd()
    for filename in _CONFIG_FILENAMES:
        candidate = os.path.join(root, filename)
        if os.path.isfile(candidate):
            log.info("Found config file: %s", candidate)
            return _parse_config_file(candidate)

    log.debug("No exactdom.yml found in %s", root)
    return FileConfig()


def _complex_value(raw: Any) -> complex:
    """A scalar, a {re, im} mapping, or a string such as "0.5+0.1j"."""
    if isinstance(raw, dict):
        return complex(float(raw.get("re", 0.0)), float(raw.get("im", 0.0)))
    if isinstance(raw, str):
        return complex(raw.replace(" ", ""))
    return complex(raw)


def _parse_config_file(path: str) -> FileConfig:
    try:
        import yaml  # type: ignore[import-untyped]
        with open(path, "r", encoding="utf-8") as fh:
            data: Dict[str, Any] = yaml.safe_load(fh) or {}
    except ImportError:
        log.warning("PyYAML not installed; %s will be ignored. pip install pyyaml to enable.", path)
        return FileConfig()
    except Exception as exc:
        log.warning("Failed to parse %s: %s", path, exc)
        return FileConfig()

    if not isinstance(data, dict):
        log.warning("%s is not a valid YAML mapping; ignoring.", path)
        return FileConfig()

    # hyphenated and underscored keys are equivalent
    data = {str(k).strip().replace("-", "_"): v for k, v in data.items()}
    config = FileConfig(source=path)

    for key in _STR_KEYS:
        if data.get(key) is not None:
            setattr(config, key, str(data[key]).strip())

    for key, cast in [(k, int) for k in _INT_KEYS] + [(k, float) for k in _FLOAT_KEYS]:
        if data.get(key) is None:
            continue
        try:
            setattr(config, key, cast(data[key]))
        except (ValueError, TypeError):
            log.warning("%s: ignoring non-numeric value for '%s': %r", path, key, data[key])

    for key in ("beta", "gamma"):
        if data.get(key) is None:
            continue
        try:
            setattr(config, key, _complex_value(data[key]))
        except (ValueError, TypeError):
            log.warning("%s: ignoring invalid value for '%s': %r", path, key, data[key])

    raw_params = data.get("target_params")
    if isinstance(raw_params, dict):
        for name, value in raw_params.items():
            try:
                config.target_params[str(name)] = _complex_value(value)
            except (ValueError, TypeError):
                log.warning("%s: ignoring invalid target parameter '%s': %r", path, name, value)
    elif raw_params is not None:
        log.warning("%s: target_params must be a mapping; ignoring.", path)

    log.info("Config file loaded: %s (%d target parameter(s))", path, len(config.target_params))
    return config
