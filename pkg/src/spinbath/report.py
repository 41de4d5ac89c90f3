"""Machine-readable report files: JSON documents and CSV time series."""

import csv
import dataclasses
import json
import logging
import math
from collections.abc import Iterable, Sequence
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

import spinbath
from spinbath import Matrix, Report
from spinbath.operators import ChainOperator

logger = logging.getLogger(__name__)

__all__ = [
    "encode_matrix",
    "decode_matrix",
    "jsonable",
    "build_report",
    "write_json",
    "write_csv",
]


def _number(x: float) -> float | str:
    """JSON has no inf/nan, so those travel as strings."""
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def encode_matrix(m: ChainOperator | ArrayLike) -> list[list[list[float | str]]]:
    """Row-major nested lists of [re, im] pairs."""
    data = m.data if isinstance(m, ChainOperator) else np.asarray(m, dtype=np.complex128)
    return [[[_number(float(z.real)), _number(float(z.imag))] for z in row] for row in data]


def decode_matrix(rows: Sequence[Sequence[Sequence[float]]]) -> Matrix:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)


def jsonable(obj: Any) -> Any:
    """Recursively turn report values (dataclasses, numpy values, operators) into plain JSON values."""
    match obj:
        case None | bool() | str():
            return obj
        case Enum():
            return obj.value
        case ChainOperator():
            return encode_matrix(obj)
        case np.ndarray() if obj.ndim == 2 and np.iscomplexobj(obj):
            return encode_matrix(obj)
        case np.ndarray():
            return jsonable(obj.tolist())
        case np.bool_():
            return bool(obj)
        case int() | np.integer():
            return int(obj)
        case float() | np.floating():
            return _number(float(obj))
        case complex() | np.complexfloating():
            return [_number(obj.real), _number(obj.imag)]
        case dict():
            return {str(k): jsonable(v) for k, v in obj.items()}
        case list() | tuple():
            return [jsonable(v) for v in obj]
        case _ if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"Cannot serialize {type(obj).__name__} into a report")


def build_report(command: str, config_digest: str, payload: Report, wall_time_s: float) -> Report:
    """Wrap a command's payload with the fields every report carries."""
    report: Report = {"command": command, "config_digest": config_digest}
    report.update(jsonable(payload))
    if not spinbath.omit_timing:
        report["wall_time_s"] = wall_time_s
    return report


def write_json(path: Path, report: Report) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info(f"Wrote report {path}")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> None:
    """A CSV file with a one-line header; floats are written with repr so they round trip exactly."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    logger.info(f"Wrote time series {path}")
