"""Quick-look PNG rendering for result tables.

One figure per table: every numeric column is scattered against a preferred
abscissa (time if present, otherwise the first sweep-like column). These are
monitoring plots for eyeballing a run, not publication figures; the delimited
output holds the authoritative data.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .runner import RunResult

__all__ = ["render_figures"]

_X_PREFERENCE = ("t", "h", "work", "g", "level", "pair", "h_i")


def render_figures(result: RunResult, stem) -> list[str]:
    """Write <stem>_<table>.png for every nonempty table; returns the paths."""
    paths = []
    for table in result.tables:
        if not table.rows:
            continue
        x_name = next((name for name in _X_PREFERENCE if name in table.columns),
                      table.columns[0])
        x_index = table.columns.index(x_name)
        x = table.column(x_name)
        figure, axes = plt.subplots(figsize=(7.0, 4.5))
        for index, name in enumerate(table.columns):
            if index == x_index:
                continue
            axes.plot(x, table.column(name), linestyle="none", marker=".",
                      markersize=3, label=name)
        axes.set_xlabel(f"{x_name} [{table.units[x_index]}]")
        axes.set_title(table.name)
        if len(table.columns) <= 9:
            axes.legend(fontsize=8)
        figure.tight_layout()
        path = f"{stem}_{table.name}.png"
        figure.savefig(path, dpi=150)
        plt.close(figure)
        paths.append(path)
    return paths
