from collections.abc import Iterable
from typing import Any

import numpy as np
from rich.table import Table
from rich.tree import Tree

from spinbath.operators import ChainOperator

BRIEF_LIMIT = 8  # Maximum number of leaf items to show in brief mode

__all__ = ["format_value", "to_tree", "matrix_table"]


def format_value(value: Any) -> str:
    """Short human form of a report value."""
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, int | np.integer):
        return str(int(value))
    if isinstance(value, float | np.floating):
        return f"{float(value):.6g}"
    if isinstance(value, complex | np.complexfloating):
        return f"{value.real:.6g}{value.imag:+.6g}i"
    return str(value)


def _is_matrix(value: Any) -> bool:
    return isinstance(value, ChainOperator) or (isinstance(value, np.ndarray) and value.ndim == 2)


def to_tree(obj: Any, label: str = "report", brief: bool = True) -> Tree:
    """Given a report, recursively descend through it to generate a nested Tree.

    Matrices are summarized by their shape.  In brief mode at most BRIEF_LIMIT children are shown
    per level, so a long list of discrepancy entries stays readable.
    """
    tree = Tree(label)

    minor_count = 0  # items seen at this level
    items: Iterable[tuple[str, Any]]
    if isinstance(obj, dict):
        items = ((str(k), v) for k, v in obj.items())
    elif isinstance(obj, Iterable) and not isinstance(obj, str):
        items = ((f"[{i}]", v) for i, v in enumerate(obj))
    else:
        tree.add(format_value(obj))
        return tree

    for key, value in items:
        minor_count += 1
        if brief and minor_count > BRIEF_LIMIT:
            continue
        if _is_matrix(value):
            shape = np.asarray(value).shape
            tree.add(f"[bold]{key}[/bold]: {shape[0]}x{shape[1]} matrix")
        elif isinstance(value, dict) or (isinstance(value, Iterable) and not isinstance(value, str)):
            tree.add(to_tree(value, label=key, brief=brief))
        else:
            tree.add(f"[bold]{key}[/bold]: {format_value(value)}")

    # Show how many items were skipped
    if brief and minor_count > BRIEF_LIMIT:
        tree.add(f"[dim]… and {minor_count - BRIEF_LIMIT} more[/dim]")

    return tree


def matrix_table(m: ChainOperator | np.ndarray, title: str | None = None) -> Table:
    """A small complex matrix as a rich table, one cell per entry."""
    data = np.asarray(m)
    table = Table(title=title, show_header=False)
    for _ in range(data.shape[1]):
        table.add_column(justify="right")
    for row in data:
        table.add_row(*(format_value(complex(z)) for z in row))
    return table
