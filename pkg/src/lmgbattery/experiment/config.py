"""Schema validation for experiment run configs.

Configs are flat YAML mappings. Every protocol has a fixed key set; unknown
keys are rejected with a nearest-match suggestion so typos fail loudly before
any computation starts. Validation never mutates the input: defaults are
applied by accessors, so a config round-trips through parse and serialize
unchanged.
"""

from __future__ import annotations

import copy
import difflib
from dataclasses import dataclass, field

import numpy as np
import yaml

__all__ = ["ConfigError", "RunConfig", "validate_config", "load_config", "PROTOCOLS"]

PROTOCOLS = (
    "spectrum",
    "wpd",
    "quench",
    "quench-sweep",
    "bath",
    "bath-sweep",
    "isotropic-check",
)

DEFAULT_COUPLING = 1.0
DEFAULT_ANISOTROPY = 0.0
DEFAULT_T_MAX = 50.0
DEFAULT_POINTS = 2000
DEFAULT_LEVELS = 5
DEFAULT_BOUNDARY_THRESHOLD = 1e-6
DEFAULT_FORMAT = "csv"


class ConfigError(Exception):
    """A config failed schema validation; the message names the offending key."""


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _require_number(key, value, minimum=None, exclusive=False):
    if not _is_number(value):
        raise ConfigError(f"key '{key}': expected a number, got {value!r}")
    if minimum is not None:
        if exclusive and value <= minimum:
            raise ConfigError(f"key '{key}': must be > {minimum}, got {value!r}")
        if not exclusive and value < minimum:
            raise ConfigError(f"key '{key}': must be >= {minimum}, got {value!r}")


def _require_int(key, value, minimum=None):
    if not _is_int(value):
        raise ConfigError(f"key '{key}': expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"key '{key}': must be >= {minimum}, got {value!r}")


def _require_string(key, value):
    if not isinstance(value, str):
        raise ConfigError(f"key '{key}': expected a string, got {value!r}")


def _require_choice(key, value, choices):
    if value not in choices:
        raise ConfigError(f"key '{key}': expected one of {sorted(choices)}, got {value!r}")


def _require_number_or_list(key, value, minimum=None):
    if _is_number(value):
        _require_number(key, value, minimum=minimum)
        return
    if isinstance(value, list) and value:
        for item in value:
            _require_number(key, item, minimum=minimum)
        return
    raise ConfigError(f"key '{key}': expected a number or nonempty list of numbers, got {value!r}")


def _require_grid(key, value, minimum=None):
    """A grid is a number, a nonempty list, or a {start, stop, num} mapping."""
    if _is_number(value) or isinstance(value, list):
        _require_number_or_list(key, value, minimum=minimum)
        return
    if isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "num"}
        if unknown:
            raise ConfigError(f"key '{key}': grid mapping has unknown keys {sorted(unknown)}")
        for bound in ("start", "stop", "num"):
            if bound not in value:
                raise ConfigError(f"key '{key}': grid mapping is missing '{bound}'")
        _require_number(f"{key}.start", value["start"], minimum=minimum)
        _require_number(f"{key}.stop", value["stop"], minimum=minimum)
        _require_int(f"{key}.num", value["num"], minimum=2)
        if value["stop"] <= value["start"]:
            raise ConfigError(f"key '{key}': grid stop must exceed start")
        return
    raise ConfigError(
        f"key '{key}': expected a number, a list, or a start/stop/num mapping, got {value!r}"
    )


def _require_int_or_list(key, value, minimum=None):
    if _is_int(value):
        _require_int(key, value, minimum=minimum)
        return
    if isinstance(value, list) and value:
        for item in value:
            _require_int(key, item, minimum=minimum)
        return
    raise ConfigError(f"key '{key}': expected an integer or nonempty list of integers, got {value!r}")


# Every schema entry is (required, validator); validators raise ConfigError.
_COMMON_SCHEMA = {
    "protocol": (True, lambda k, v: _require_choice(k, v, PROTOCOLS)),
    "N": (True, lambda k, v: _require_int(k, v, minimum=1)),
    "lambda": (False, lambda k, v: _require_number(k, v, minimum=0, exclusive=True)),
    "gamma": (False, lambda k, v: _require_number(k, v, minimum=0)),
    "description": (False, _require_string),
    "expected_runtime": (False, _require_string),
    "output": (False, _require_string),
    "format": (False, lambda k, v: _require_choice(k, v, ("csv", "json"))),
}

_TIME_KEYS = {
    "t_max": (False, lambda k, v: _require_number(k, v, minimum=0, exclusive=True)),
    "points": (False, lambda k, v: _require_int(k, v, minimum=2)),
}

_SCHEMAS = {
    "spectrum": {
        "h": (True, lambda k, v: _require_grid(k, v, minimum=0)),
        "levels": (False, lambda k, v: _require_int(k, v, minimum=1)),
        "boundary_pairs": (False, lambda k, v: _require_int(k, v, minimum=1)),
        "boundary_threshold": (False, lambda k, v: _require_number(k, v, minimum=0, exclusive=True)),
    },
    "wpd": {
        "h_i": (True, lambda k, v: _require_number_or_list(k, v, minimum=0)),
        "h_c": (True, lambda k, v: _require_number_or_list(k, v, minimum=0)),
    },
    "quench": {
        "h_i": (True, lambda k, v: _require_number_or_list(k, v, minimum=0)),
        "h_c": (True, lambda k, v: _require_number_or_list(k, v, minimum=0)),
        "M": (False, lambda k, v: _require_int_or_list(k, v, minimum=1)),
        "interaction_norm": (False, lambda k, v: _require_choice(k, v, ("cells", "total"))),
        **_TIME_KEYS,
    },
    "quench-sweep": {
        "h_i": (True, lambda k, v: _require_number_or_list(k, v, minimum=0)),
        "h_c": (True, lambda k, v: _require_grid(k, v, minimum=0)),
        "M": (False, lambda k, v: _require_int_or_list(k, v, minimum=1)),
        "interaction_norm": (False, lambda k, v: _require_choice(k, v, ("cells", "total"))),
        "t_opt_from": (False, lambda k, v: _require_choice(k, v, ("power", "work"))),
        **_TIME_KEYS,
    },
    "bath": {
        "h_i": (True, lambda k, v: _require_number_or_list(k, v, minimum=0)),
        "g": (True, lambda k, v: _require_number_or_list(k, v, minimum=0)),
        "omega": (False, lambda k, v: _require_number(k, v, minimum=0, exclusive=True)),
        "n_init": (True, lambda k, v: _require_int(k, v, minimum=0)),
        "n_max": (True, lambda k, v: _require_int(k, v, minimum=2)),
        **_TIME_KEYS,
    },
    "bath-sweep": {
        "h_i": (True, lambda k, v: _require_number_or_list(k, v, minimum=0)),
        "g": (True, lambda k, v: _require_grid(k, v, minimum=0)),
        "omega": (False, lambda k, v: _require_number(k, v, minimum=0, exclusive=True)),
        "n_init": (True, lambda k, v: _require_int(k, v, minimum=0)),
        "n_max": (True, lambda k, v: _require_int(k, v, minimum=2)),
        **_TIME_KEYS,
    },
    "isotropic-check": {
        "field_grid": (False, lambda k, v: _require_grid(k, v, minimum=0)),
        "levels": (False, lambda k, v: _require_int(k, v, minimum=1)),
        "h_i": (False, lambda k, v: _require_number_or_list(k, v, minimum=0)),
        "h_c": (False, lambda k, v: _require_number(k, v, minimum=0)),
    },
}


def _check_unknown_keys(raw: dict, allowed: set[str]) -> None:
    for key in raw:
        if not isinstance(key, str):
            raise ConfigError(f"config keys must be strings, got {key!r}")
        if key not in allowed:
            hint = difflib.get_close_matches(key, sorted(allowed), n=1)
            suffix = f" (did you mean '{hint[0]}'?)" if hint else ""
            raise ConfigError(f"unknown key '{key}'{suffix}")


def _as_list(value) -> list:
    return list(value) if isinstance(value, list) else [value]


def _cross_checks(config: "RunConfig") -> None:
    data = config.data
    protocol = config.protocol
    n = data["N"]
    if protocol == "spectrum":
        if data.get("levels", DEFAULT_LEVELS) > n:
            raise ConfigError(f"key 'levels': at most N={n} excited levels exist")
        if "boundary_pairs" in data and 2 * data["boundary_pairs"] > n:
            raise ConfigError(f"key 'boundary_pairs': needs 2*pairs <= N={n}")
    if protocol in ("quench", "quench-sweep") and "M" in data:
        for m in _as_list(data["M"]):
            if m > n:
                raise ConfigError(f"key 'M': block size {m} exceeds N={n}")
    if protocol in ("bath", "bath-sweep"):
        if data["n_max"] <= data["n_init"] + n:
            raise ConfigError(
                f"key 'n_max': must exceed n_init + N = {data['n_init'] + n} for headroom"
            )
    if protocol == "isotropic-check":
        if "gamma" in data and data["gamma"] != 1:
            raise ConfigError("key 'gamma': isotropic-check requires gamma = 1")
        has_grid = "field_grid" in data
        has_quench = "h_i" in data or "h_c" in data
        if not has_grid and not has_quench:
            raise ConfigError("isotropic-check needs 'field_grid' and/or 'h_i'+'h_c'")
        if has_quench and not ("h_i" in data and "h_c" in data):
            raise ConfigError("keys 'h_i' and 'h_c' must be given together")
        if has_grid:
            for h in resolve_grid(data["field_grid"]):
                if h == 1.0:
                    raise ConfigError(
                        "key 'field_grid': the gap formulas are undefined at the critical field h=1"
                    )
    if "gamma" in data and data["gamma"] > 1:
        raise ConfigError(f"key 'gamma': must lie in [0, 1], got {data['gamma']!r}")


def resolve_grid(value) -> np.ndarray:
    """Materialize a validated grid spec into a float array."""
    if isinstance(value, dict):
        return np.linspace(float(value["start"]), float(value["stop"]), int(value["num"]))
    if isinstance(value, list):
        return np.asarray([float(v) for v in value])
    return np.asarray([float(value)])


@dataclass(frozen=True)
class RunConfig:
    """A validated config; `data` is the exact mapping that was parsed."""

    data: dict = field(repr=False)

    @property
    def protocol(self) -> str:
        return self.data["protocol"]

    @property
    def num_spins(self) -> int:
        return self.data["N"]

    @property
    def coupling(self) -> float:
        return float(self.data.get("lambda", DEFAULT_COUPLING))

    @property
    def anisotropy(self) -> float:
        if self.protocol == "isotropic-check":
            return 1.0
        return float(self.data.get("gamma", DEFAULT_ANISOTROPY))

    @property
    def t_max(self) -> float:
        return float(self.data.get("t_max", DEFAULT_T_MAX))

    @property
    def points(self) -> int:
        return self.data.get("points", DEFAULT_POINTS)

    @property
    def output_format(self) -> str:
        return self.data.get("format", DEFAULT_FORMAT)

    @property
    def output_stem(self) -> str | None:
        return self.data.get("output")

    def get(self, key, default=None):
        return self.data.get(key, default)

    def number_list(self, key) -> list[float]:
        return [float(v) for v in _as_list(self.data[key])]

    def int_list(self, key) -> list[int]:
        return [int(v) for v in _as_list(self.data[key])]

    def grid(self, key) -> np.ndarray:
        return resolve_grid(self.data[key])

    def to_dict(self) -> dict:
        return copy.deepcopy(self.data)


def validate_config(raw) -> RunConfig:
    """Validate a parsed mapping against its protocol schema."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config must be a mapping, got {type(raw).__name__}")
    if "protocol" not in raw:
        raise ConfigError("key 'protocol' is required")
    protocol = raw["protocol"]
    if protocol not in PROTOCOLS:
        hint = difflib.get_close_matches(str(protocol), PROTOCOLS, n=1)
        suffix = f" (did you mean '{hint[0]}'?)" if hint else ""
        raise ConfigError(f"key 'protocol': unknown protocol {protocol!r}{suffix}")
    schema = {**_COMMON_SCHEMA, **_SCHEMAS[protocol]}
    _check_unknown_keys(raw, set(schema))
    for key, (required, validator) in schema.items():
        if key in raw:
            validator(key, raw[key])
        elif required:
            raise ConfigError(f"key '{key}' is required for protocol '{protocol}'")
    config = RunConfig(data=copy.deepcopy(raw))
    _cross_checks(config)
    return config


def load_config(path) -> RunConfig:
    """Read a YAML config file and validate it."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = yaml.safe_load(handle)
    except OSError as error:
        raise ConfigError(f"cannot read config {path}: {error}") from error
    except yaml.YAMLError as error:
        raise ConfigError(f"config {path} is not valid YAML: {error}") from error
    try:
        return validate_config(raw)
    except ConfigError as error:
        raise ConfigError(f"{path}: {error}") from error
