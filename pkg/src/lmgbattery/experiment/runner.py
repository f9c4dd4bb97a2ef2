"""Protocol dispatch and output serialization for experiment configs.

Each protocol maps a validated config onto the library and collects rows into
named tables. Sweep points are independent and run on a thread pool (the
heavy lifting happens inside BLAS, which releases the GIL); results are
concatenated in parameter order, so the thread count never changes the
output. Writers emit CSV with a commented metadata block or a JSON mirror;
the numeric payload is byte-deterministic for a fixed config and platform.
"""

from __future__ import annotations

import datetime
import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .. import __version__
from ..bath import BathSpec, coupling_sweep, default_frequency, run_bath_charging
from ..operators import (
    LmgParams,
    build_lmg_hamiltonian,
    isotropic_gap,
    isotropic_gap_closings,
)
from ..quench import QuenchSpec, SuddenQuench, default_time_grid, phase_boundary
from ..spectral import diagonalize
from ..subsystem import subsystem_dynamics
from .config import (
    DEFAULT_BOUNDARY_THRESHOLD,
    DEFAULT_LEVELS,
    ConfigError,
    RunConfig,
    resolve_grid,
)

__all__ = ["ResultTable", "RunResult", "run_config", "write_csv", "write_json"]

WPD_SUPPORT_CUTOFF = 1e-12


@dataclass(frozen=True)
class ResultTable:
    """One named table: column names, per-column units, numeric rows."""

    name: str
    columns: list[str]
    units: list[str]
    rows: list[tuple]

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name)
        return np.asarray([row[index] for row in self.rows], dtype=float)


@dataclass(frozen=True)
class RunResult:
    config: RunConfig
    tables: list[ResultTable]

    def table(self, name: str) -> ResultTable:
        for table in self.tables:
            if table.name == name:
                return table
        raise KeyError(f"no table named {name!r}")


def _parallel_map(fn, items, threads):
    items = list(items)
    if threads is None:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _params(config: RunConfig, field: float) -> LmgParams:
    return LmgParams(
        num_spins=config.num_spins,
        coupling=config.coupling,
        anisotropy=config.anisotropy,
        field=float(field),
    )


def _time_grid(config: RunConfig) -> np.ndarray:
    return default_time_grid(config.t_max, config.points)


def _quench(config: RunConfig, h_i: float, h_c: float) -> SuddenQuench:
    spec = QuenchSpec(_params(config, h_i), _params(config, h_c), times=_time_grid(config))
    return SuddenQuench(spec)


# -- protocol implementations ---------------------------------------------


def _run_spectrum(config: RunConfig, threads) -> list[ResultTable]:
    fields = config.grid("h")
    levels = config.get("levels", DEFAULT_LEVELS)

    def point(h):
        energies = diagonalize(build_lmg_hamiltonian(_params(config, h))).eigenvalues
        return (float(h), *(float(energies[k] - energies[0]) for k in range(1, levels + 1)))

    gap_rows = _parallel_map(point, fields, threads)
    tables = [ResultTable(
        name="gaps",
        columns=["h"] + [f"gap_{k}" for k in range(1, levels + 1)],
        units=["lambda"] * (levels + 1),
        rows=gap_rows,
    )]
    if "boundary_pairs" in config.data:
        pairs = config.data["boundary_pairs"]
        threshold = config.get("boundary_threshold", DEFAULT_BOUNDARY_THRESHOLD)
        critical = phase_boundary(config.num_spins, config.anisotropy, fields,
                                  pairs, threshold=threshold, coupling=config.coupling)
        tables.append(ResultTable(
            name="boundary",
            columns=["pair", "critical_field"],
            units=["1", "lambda"],
            rows=[(p, float(critical[p])) for p in range(pairs)],
        ))
    return tables


def _wpd_rows(config: RunConfig, h_i: float, h_c: float, cutoff: float = 0.0) -> list[tuple]:
    quench = _quench(config, h_i, h_c)
    distribution = quench.work_distribution()
    rows = []
    for work, probability in zip(distribution.work_values, distribution.probabilities):
        if probability >= cutoff:
            rows.append((h_i, h_c, float(work), float(probability)))
    return rows


def _run_wpd(config: RunConfig, threads) -> list[ResultTable]:
    pairs = list(itertools.product(config.number_list("h_i"), config.number_list("h_c")))
    chunks = _parallel_map(lambda p: _wpd_rows(config, *p), pairs, threads)
    return [ResultTable(
        name="wpd",
        columns=["h_i", "h_c", "work", "probability"],
        units=["lambda", "lambda", "lambda", "1"],
        rows=[row for chunk in chunks for row in chunk],
    )]


def _summary_row(h_i, h_c, result) -> tuple:
    return (
        h_i, h_c,
        float(result.work_max), float(result.work_max_time),
        float(result.power_max),
        None if result.optimal_time is None else float(result.optimal_time),
        float(result.average_work), float(np.sqrt(result.work_variance)),
    )


_SUMMARY_COLUMNS = ["h_i", "h_c", "work_max", "work_max_time", "power_max",
                    "optimal_time", "average_work", "work_std"]
_SUMMARY_UNITS = ["lambda", "lambda", "lambda", "1/lambda", "lambda^2",
                  "1/lambda", "lambda", "lambda"]


def _block_sizes(config: RunConfig) -> list[int]:
    return config.int_list("M") if "M" in config.data else []


def _run_quench(config: RunConfig, threads) -> list[ResultTable]:
    pairs = list(itertools.product(config.number_list("h_i"), config.number_list("h_c")))
    t_opt_from = config.get("t_opt_from", "power")
    norm = config.get("interaction_norm", "cells")
    blocks = _block_sizes(config)

    def point(pair):
        h_i, h_c = pair
        quench = _quench(config, h_i, h_c)
        result = quench.result(t_opt_from=t_opt_from)
        series = [
            (h_i, h_c, float(t), float(w), float(p), float(s))
            for t, w, p, s in zip(result.times, result.work_series,
                                  result.power_series, result.entropy_series)
        ]
        block_rows = []
        for m in blocks:
            dynamics = subsystem_dynamics(quench, m, interaction_norm=norm)
            block_rows += [
                (h_i, h_c, m, float(t), float(w), float(e), float(r))
                for t, w, e, r in zip(dynamics.times, dynamics.work_series,
                                      dynamics.ergotropy_series, dynamics.ratio_series)
            ]
        return series, _summary_row(h_i, h_c, result), block_rows

    outcomes = _parallel_map(point, pairs, threads)
    tables = [
        ResultTable(
            name="series",
            columns=["h_i", "h_c", "t", "work", "power", "entropy"],
            units=["lambda", "lambda", "1/lambda", "lambda", "lambda^2", "1"],
            rows=[row for series, _, _ in outcomes for row in series],
        ),
        ResultTable(
            name="summary",
            columns=_SUMMARY_COLUMNS,
            units=_SUMMARY_UNITS,
            rows=[summary for _, summary, _ in outcomes],
        ),
    ]
    if blocks:
        tables.append(ResultTable(
            name="subsystem",
            columns=["h_i", "h_c", "M", "t", "block_work", "ergotropy", "ratio"],
            units=["lambda", "lambda", "1", "1/lambda", "lambda", "lambda", "1"],
            rows=[row for _, _, block in outcomes for row in block],
        ))
    return tables


def _run_quench_sweep(config: RunConfig, threads) -> list[ResultTable]:
    points = list(itertools.product(config.number_list("h_i"),
                                    resolve_grid(config.data["h_c"])))
    t_opt_from = config.get("t_opt_from", "power")
    norm = config.get("interaction_norm", "cells")
    blocks = _block_sizes(config)

    def point(pair):
        h_i, h_c = float(pair[0]), float(pair[1])
        quench = _quench(config, h_i, h_c)
        result = quench.result(t_opt_from=t_opt_from)
        block_rows = []
        for m in blocks:
            dynamics = subsystem_dynamics(quench, m, interaction_norm=norm)
            peak = int(np.argmax(dynamics.ergotropy_series))
            block_rows.append((
                h_i, h_c, m,
                float(dynamics.ergotropy_series[peak]),
                float(dynamics.times[peak]),
                float(dynamics.ratio_series[peak]),
            ))
        return _summary_row(h_i, h_c, result), block_rows

    outcomes = _parallel_map(point, points, threads)
    tables = [ResultTable(
        name="summary",
        columns=_SUMMARY_COLUMNS,
        units=_SUMMARY_UNITS,
        rows=[summary for summary, _ in outcomes],
    )]
    if blocks:
        tables.append(ResultTable(
            name="subsystem_summary",
            columns=["h_i", "h_c", "M", "ergotropy_max", "ergotropy_max_time", "ratio_at_peak"],
            units=["lambda", "lambda", "1", "lambda", "1/lambda", "1"],
            rows=[row for _, block in outcomes for row in block],
        ))
    return tables


def _bath_spec(config: RunConfig, h_i: float, g: float) -> BathSpec:
    omega = config.get("omega")
    if omega is None:
        omega = default_frequency(_params(config, h_i))
    return BathSpec(
        frequency=float(omega),
        coupling_strength=float(g),
        initial_photons=config.data["n_init"],
        fock_cutoff=config.data["n_max"],
    )


def _run_bath(config: RunConfig, threads) -> list[ResultTable]:
    points = list(itertools.product(config.number_list("h_i"), config.number_list("g")))
    times = _time_grid(config)

    def point(pair):
        h_i, g = pair
        run = run_bath_charging(_params(config, h_i), _bath_spec(config, h_i, g), times)
        series = [
            (h_i, g, float(t), float(w), float(n), float(e), float(r))
            for t, w, n, e, r in zip(run.times, run.work_series, run.photon_series,
                                     run.ergotropy_series, run.ratio_series)
        ]
        occupations = [
            (h_i, g, level, float(population))
            for level, population in enumerate(run.occupations)
        ]
        peak = int(np.argmax(run.work_series))
        summary = (h_i, g, run.work_max, run.work_max_time,
                   float(run.ergotropy_series[peak]), float(run.ratio_series[peak]))
        return series, occupations, summary

    outcomes = _parallel_map(point, points, threads)
    return [
        ResultTable(
            name="series",
            columns=["h_i", "g", "t", "work", "photons", "ergotropy", "ratio"],
            units=["lambda", "lambda", "1/lambda", "lambda", "1", "lambda", "1"],
            rows=[row for series, _, _ in outcomes for row in series],
        ),
        ResultTable(
            name="occupations",
            columns=["h_i", "g", "level", "population"],
            units=["lambda", "lambda", "1", "1"],
            rows=[row for _, occupations, _ in outcomes for row in occupations],
        ),
        ResultTable(
            name="summary",
            columns=["h_i", "g", "work_max", "work_max_time", "ergotropy_at_peak", "ratio_at_peak"],
            units=["lambda", "lambda", "lambda", "1/lambda", "lambda", "1"],
            rows=[summary for _, _, summary in outcomes],
        ),
    ]


def _run_bath_sweep(config: RunConfig, threads) -> list[ResultTable]:
    couplings = resolve_grid(config.data["g"])
    times = _time_grid(config)

    def point(pair):
        h_i, g = float(pair[0]), float(pair[1])
        summary = coupling_sweep(_params(config, h_i), _bath_spec(config, h_i, g),
                                 [g], times)[0]
        return (h_i, summary["g"], summary["work_max"],
                summary["ergotropy_at_peak"], summary["ratio"])

    points = list(itertools.product(config.number_list("h_i"), couplings))
    rows = _parallel_map(point, points, threads)
    return [ResultTable(
        name="summary",
        columns=["h_i", "g", "work_max", "ergotropy_at_peak", "ratio"],
        units=["lambda", "lambda", "lambda", "lambda", "1"],
        rows=rows,
    )]


def _run_isotropic_check(config: RunConfig, threads) -> list[ResultTable]:
    tables = []
    if "field_grid" in config.data:
        fields = config.grid("field_grid")
        levels = config.get("levels", DEFAULT_LEVELS)
        gap_rows = [
            (float(h), level, float(isotropic_gap(config.num_spins, float(h), level,
                                                  coupling=config.coupling)))
            for h in fields
            for level in range(1, levels + 1)
        ]
        closing_rows = [
            (level, float(h))
            for level in range(1, levels + 1)
            for h in isotropic_gap_closings(config.num_spins, level, coupling=config.coupling)
        ]
        tables.append(ResultTable(
            name="gaps",
            columns=["h", "level", "gap"],
            units=["lambda", "1", "lambda"],
            rows=gap_rows,
        ))
        tables.append(ResultTable(
            name="closings",
            columns=["level", "field"],
            units=["1", "lambda"],
            rows=closing_rows,
        ))
    if "h_i" in config.data:
        h_c = float(config.data["h_c"])
        pairs = [(h_i, h_c) for h_i in config.number_list("h_i")]
        chunks = _parallel_map(
            lambda p: _wpd_rows(config, *p, cutoff=WPD_SUPPORT_CUTOFF), pairs, threads)
        tables.append(ResultTable(
            name="wpd",
            columns=["h_i", "h_c", "work", "probability"],
            units=["lambda", "lambda", "lambda", "1"],
            rows=[row for chunk in chunks for row in chunk],
        ))
    return tables


_PROTOCOL_RUNNERS = {
    "spectrum": _run_spectrum,
    "wpd": _run_wpd,
    "quench": _run_quench,
    "quench-sweep": _run_quench_sweep,
    "bath": _run_bath,
    "bath-sweep": _run_bath_sweep,
    "isotropic-check": _run_isotropic_check,
}


def run_config(config: RunConfig, threads: int | None = None) -> RunResult:
    """Execute a validated config and return its tables."""
    if config.protocol in ("bath", "bath-sweep") and config.get("omega") is None:
        for h_i in config.number_list("h_i"):
            if h_i == 0.0:
                raise ConfigError("key 'omega' is required when any h_i is 0")
    runner = _PROTOCOL_RUNNERS[config.protocol]
    return RunResult(config=config, tables=runner(config, threads))


# -- serialization ---------------------------------------------------------


def canonical_config_json(config: RunConfig) -> str:
    return json.dumps(config.to_dict(), sort_keys=True, separators=(",", ":"))


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("boolean cells are not part of the output contract")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _python_cell(value):
    if value is None or isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, (bool, np.bool_)):
        return int(value)
    return float(value)


def write_csv(result: RunResult, path) -> None:
    """CSV with a commented metadata block; every non-comment line is payload."""
    lines = [
        f"# lmgbattery {__version__}",
        f"# config: {canonical_config_json(result.config)}",
        f"# written: {datetime.datetime.now(datetime.timezone.utc).isoformat()}",
    ]
    for table in result.tables:
        lines.append(f"# table: {table.name}")
        lines.append(",".join(
            f"{name}[{unit}]" for name, unit in zip(table.columns, table.units)))
        for row in table.rows:
            lines.append(",".join(_format_cell(value) for value in row))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def tables_payload(result: RunResult) -> dict:
    """The deterministic portion of the output: every table as plain lists."""
    return {
        table.name: {
            "columns": list(table.columns),
            "units": list(table.units),
            "rows": [[_python_cell(value) for value in row] for row in table.rows],
        }
        for table in result.tables
    }


def write_json(result: RunResult, path) -> None:
    document = {
        "meta": {
            "version": __version__,
            "config": result.config.to_dict(),
            "written": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        },
        "tables": tables_payload(result),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(document, handle, sort_keys=True, indent=2)
        handle.write("\n")
