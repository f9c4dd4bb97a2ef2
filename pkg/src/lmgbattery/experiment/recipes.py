"""Bundled, ready-to-run experiment configs."""

from __future__ import annotations

from importlib import resources

import yaml

from .config import ConfigError, RunConfig, validate_config

__all__ = ["recipe_names", "recipe_text", "load_recipe", "recipe_catalog"]


def _recipe_root():
    return resources.files("lmgbattery.experiment") / "recipes"


def recipe_names() -> list[str]:
    names = [entry.name[:-5] for entry in _recipe_root().iterdir()
             if entry.name.endswith(".yaml")]
    return sorted(names)


def recipe_text(name: str) -> str:
    entry = _recipe_root() / f"{name}.yaml"
    try:
        return entry.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as error:
        raise ConfigError(f"no bundled recipe named {name!r}") from error


def load_recipe(name: str) -> RunConfig:
    raw = yaml.safe_load(recipe_text(name))
    try:
        return validate_config(raw)
    except ConfigError as error:
        raise ConfigError(f"recipe {name}: {error}") from error


def recipe_catalog() -> list[dict]:
    """Name, protocol, description, and expected runtime of every recipe."""
    catalog = []
    for name in recipe_names():
        config = load_recipe(name)
        catalog.append({
            "name": name,
            "protocol": config.protocol,
            "description": config.get("description", ""),
            "expected_runtime": config.get("expected_runtime", ""),
        })
    return catalog
