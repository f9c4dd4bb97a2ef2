"""Command line entry point: run configs or recipes, list recipes, validate."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from ..spectral import NumericsError
from .config import ConfigError, RunConfig, load_config
from .recipes import load_recipe, recipe_catalog, recipe_names
from .runner import run_config, write_csv, write_json

__all__ = ["main", "build_parser"]

OUTPUT_DIR_ENV = "SIM_OUTPUT_DIR"
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICS = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Collective-spin quantum battery experiments: "
                    "spectra, quench charging, bath charging, sweeps.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="execute a config file or bundled recipe")
    run.add_argument("config", help="path to a YAML config, or a bundled recipe name")
    run.add_argument("--threads", type=int, default=None,
                     help="worker threads for sweep points (default: all cores)")
    run.add_argument("--output-dir", default=None,
                     help=f"output directory (default: ${OUTPUT_DIR_ENV} or cwd)")
    run.add_argument("--format", choices=("csv", "json"), default=None,
                     help="output format (default: config 'format' key or csv)")
    run.add_argument("--no-figures", action="store_true",
                     help="skip PNG rendering, write only the data file")

    commands.add_parser("recipes", help="list bundled recipes")

    validate = commands.add_parser("validate", help="check a config without running it")
    validate.add_argument("config", help="path to a YAML config, or a bundled recipe name")

    return parser


def _resolve_config(argument: str) -> tuple[RunConfig, str]:
    """Accept a config path or a bundled recipe name; return (config, output stem)."""
    path = Path(argument)
    if path.exists():
        return load_config(path), path.stem
    if argument in recipe_names():
        return load_recipe(argument), argument
    raise ConfigError(f"{argument!r} is neither a config file nor a bundled recipe "
                      f"(recipes: {', '.join(recipe_names())})")


def _command_run(args) -> int:
    config, stem = _resolve_config(args.config)
    if args.threads is not None and args.threads < 1:
        raise ConfigError(f"--threads must be >= 1, got {args.threads}")
    output_dir = Path(args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or ".")
    output_dir.mkdir(parents=True, exist_ok=True)
    stem = config.output_stem or stem

    result = run_config(config, threads=args.threads)

    fmt = args.format or config.output_format
    data_path = output_dir / f"{stem}.{fmt}"
    if fmt == "json":
        write_json(result, data_path)
    else:
        write_csv(result, data_path)
    print(f"wrote {data_path}")

    if not args.no_figures:
        from .figures import render_figures

        for figure_path in render_figures(result, output_dir / stem):
            print(f"wrote {figure_path}")
    return EXIT_OK


def _command_recipes() -> int:
    catalog = recipe_catalog()
    width = max(len(entry["name"]) for entry in catalog)
    proto_width = max(len(entry["protocol"]) for entry in catalog)
    time_width = max(len(entry["expected_runtime"]) for entry in catalog)
    for entry in catalog:
        print(f"{entry['name']:<{width}}  {entry['protocol']:<{proto_width}}  "
              f"{entry['expected_runtime']:<{time_width}}  {entry['description']}")
    return EXIT_OK


def _command_validate(args) -> int:
    config, _ = _resolve_config(args.config)
    print(f"OK: {args.config} ({config.protocol})")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _command_run(args)
        if args.command == "recipes":
            return _command_recipes()
        return _command_validate(args)
    except ConfigError as error:
        print(f"config error: {error}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericsError as error:
        print(f"numerics error: {error}", file=sys.stderr)
        return EXIT_NUMERICS


if __name__ == "__main__":
    sys.exit(main())
