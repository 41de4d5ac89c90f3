"""Shared utilities for spinbath commands."""

from pathlib import Path
from typing import Annotated, Any

import typer
from rich.style import Style
from rich.table import Table

from spinbath.rich import format_value

# Define reusable table styles
TABLE_COLUMN_STYLE = Style(color="cyan")
TABLE_VALUE_STYLE = Style(color="green")
TABLE_HEADER_STYLE = Style(color="magenta", bold=True)

# Options every analysis command takes
ConfigOption = Annotated[
    Path | None,
    typer.Option("--config", "-c", help="Run configuration (JSON, or TOML by suffix)."),
]
OutOption = Annotated[
    Path | None,
    typer.Option("--out", "-o", help="Write the report (JSON, or CSV for evolve) to this path."),
]
SeedOption = Annotated[
    int | None,
    typer.Option("--seed", help="Root seed for stochastic sweeps (overrides the config)."),
]
TolOption = Annotated[
    float | None,
    typer.Option("--tol", help="Numerical contract tolerance (overrides the config)."),
]

__all__ = [
    "TABLE_COLUMN_STYLE",
    "TABLE_VALUE_STYLE",
    "TABLE_HEADER_STYLE",
    "ConfigOption",
    "OutOption",
    "SeedOption",
    "TolOption",
    "summary_table",
]


def summary_table(title: str, rows: list[tuple[str, Any]]) -> Table:
    """A two column name/value table."""
    table = Table(header_style=TABLE_HEADER_STYLE, title=title)
    table.add_column("Quantity", style=TABLE_COLUMN_STYLE, no_wrap=True)
    table.add_column("Value", style=TABLE_VALUE_STYLE, justify="right")
    for name, value in rows:
        table.add_row(name, format_value(value))
    return table
