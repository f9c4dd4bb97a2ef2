"""Declarative experiment runner: config parsing, sweeps, file output, recipes."""

from .config import ConfigError, RunConfig, load_config, validate_config
from .runner import ResultTable, RunResult, run_config, write_csv, write_json

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "validate_config",
    "ResultTable",
    "RunResult",
    "run_config",
    "write_csv",
    "write_json",
]
